#pragma once

// Bundled benchmark values used for the reference / delta columns.
//
// File layout (CSV, header required):
//   product,vol,phi,L0,N,K,coefficients,k,source,item,value,std_error
// source is pde, mc_full or mc_frozen; k is set only for partial sums.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "anovapde/error.hpp"

namespace anovapde::cli {

struct ReferenceKey {
    std::string product;
    double vol = 0.0;
    double phi = 0.0;
    double level = 0.0;  // flat initial curve
    int n = 0;
    double strike = 0.0;
    std::string coefficients;
    std::optional<int> k;
    std::string source;
    std::string item;
};

struct ReferenceEntry {
    ReferenceKey key;
    double value = 0.0;
    std::optional<double> std_error;
};

class ReferenceTable {
public:
    ReferenceTable() = default;

    static ReferenceTable load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open reference data '" + path + "'");
        return parse(in, path);
    }

    static ReferenceTable parse(std::istream& in, const std::string& name = "<stream>") {
        ReferenceTable t;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (lineno == 1) {
                if (line.rfind("product,", 0) != 0) throw ConfigError(name + ": missing header line");
                continue;
            }
            std::vector<std::string> f;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) f.push_back(cell);
            if (line.back() == ',') f.emplace_back();
            if (f.size() != 12)
                throw ConfigError(name + ":" + std::to_string(lineno) + ": expected 12 fields, got " +
                                  std::to_string(f.size()));
            try {
                ReferenceEntry e;
                e.key.product = f[0];
                e.key.vol = std::stod(f[1]);
                e.key.phi = std::stod(f[2]);
                e.key.level = std::stod(f[3]);
                e.key.n = std::stoi(f[4]);
                e.key.strike = std::stod(f[5]);
                e.key.coefficients = f[6];
                if (!f[7].empty()) e.key.k = std::stoi(f[7]);
                e.key.source = f[8];
                e.key.item = f[9];
                e.value = std::stod(f[10]);
                if (!f[11].empty()) e.std_error = std::stod(f[11]);
                t.entries_.push_back(std::move(e));
            } catch (const std::logic_error&) {
                throw ConfigError(name + ":" + std::to_string(lineno) + ": malformed number");
            }
        }
        return t;
    }

    const ReferenceEntry* find(const ReferenceKey& k) const {
        for (const auto& e : entries_)
            if (matches(e.key, k)) return &e;
        return nullptr;
    }

    std::optional<double> value(const ReferenceKey& k) const {
        const ReferenceEntry* e = find(k);
        return e ? std::optional<double>(e->value) : std::nullopt;
    }

    std::size_t size() const { return entries_.size(); }

private:
    static bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

    static bool matches(const ReferenceKey& a, const ReferenceKey& b) {
        return a.product == b.product && a.n == b.n && a.coefficients == b.coefficients && a.k == b.k &&
               a.source == b.source && a.item == b.item && close(a.vol, b.vol) && close(a.phi, b.phi) &&
               close(a.level, b.level) && close(a.strike, b.strike);
    }

    std::vector<ReferenceEntry> entries_;
};

}  // namespace anovapde::cli
