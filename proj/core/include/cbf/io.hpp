#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "cbf/deterministic.hpp"
#include "cbf/field.hpp"

namespace cbf {

// CSV with a config-hash comment line; numbers printed with %.17g so reruns
// of the same config give identical bytes.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header,
              const std::string& config_hash);
    void row(const std::vector<std::string>& cells);
    static std::string num(double v);
    static std::string num(std::uint64_t v);
    static std::string num(std::int64_t v);

private:
    std::ofstream out_;
    std::size_t columns_;
};

// Binary snapshot of one or more coefficient fields.
// Layout (little-endian): magic "CBF1"; header {n: u32, L: f64, r: u32,
// t: f64, count: u32}; then per field the complex coefficient triples in
// lexicographic k-order, k_i running -n/2+1 .. n/2, components innermost.
struct Snapshot {
    Grid grid;
    int r = 0;
    double t = 0.0;
    std::vector<SpectralField> fields;
};

void write_snapshot(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot(const std::string& path);

void write_ledger_csv(const std::string& path, const EnergyLedger& ledger,
                      const std::string& config_hash);

}  // namespace cbf
