#include "cbf/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>

namespace cbf {

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header,
                     const std::string& config_hash)
    : out_(path, std::ios::binary), columns_(header.size()) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    out_ << "# config_hash=" << config_hash << "\n";
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::logic_error("CsvWriter: column count mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
}

std::string CsvWriter::num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string CsvWriter::num(std::uint64_t v) { return std::to_string(v); }
std::string CsvWriter::num(std::int64_t v) { return std::to_string(v); }

namespace {

template <typename T>
void put(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T take(std::ifstream& in) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

}  // namespace

void write_snapshot(const std::string& path, const Snapshot& snap) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write("CBF1", 4);
    put<std::uint32_t>(out, std::uint32_t(snap.grid.n));
    put<double>(out, snap.grid.L);
    put<std::uint32_t>(out, std::uint32_t(snap.r));
    put<double>(out, snap.t);
    put<std::uint32_t>(out, std::uint32_t(snap.fields.size()));
    const Grid& g = snap.grid;
    for (const auto& f : snap.fields) {
        f.check_same_grid(SpectralField(g));
        for (int ki = -g.n / 2 + 1; ki <= g.n / 2; ++ki)
            for (int kj = -g.n / 2 + 1; kj <= g.n / 2; ++kj)
                for (int kl = -g.n / 2 + 1; kl <= g.n / 2; ++kl) {
                    int i = g.index_of_wave(ki), j = g.index_of_wave(kj), l = g.index_of_wave(kl);
                    for (int c = 0; c < 3; ++c) {
                        const cplx& v = f.at(c, i, j, l);
                        put<double>(out, v.real());
                        put<double>(out, v.imag());
                    }
                }
    }
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open snapshot: " + path);
    char magic[4];
    in.read(magic, 4);
    if (std::memcmp(magic, "CBF1", 4) != 0) throw std::runtime_error("bad snapshot magic: " + path);
    auto n = take<std::uint32_t>(in);
    auto L = take<double>(in);
    auto r = take<std::uint32_t>(in);
    auto t = take<double>(in);
    auto count = take<std::uint32_t>(in);
    Snapshot snap;
    snap.grid = Grid(int(n), L);
    snap.r = int(r);
    snap.t = t;
    const Grid& g = snap.grid;
    for (std::uint32_t m = 0; m < count; ++m) {
        SpectralField f(g);
        for (int ki = -g.n / 2 + 1; ki <= g.n / 2; ++ki)
            for (int kj = -g.n / 2 + 1; kj <= g.n / 2; ++kj)
                for (int kl = -g.n / 2 + 1; kl <= g.n / 2; ++kl) {
                    int i = g.index_of_wave(ki), j = g.index_of_wave(kj), l = g.index_of_wave(kl);
                    for (int c = 0; c < 3; ++c) {
                        double re = take<double>(in);
                        double im = take<double>(in);
                        f.at(c, i, j, l) = cplx(re, im);
                    }
                }
        snap.fields.push_back(std::move(f));
    }
    if (!in) throw std::runtime_error("truncated snapshot: " + path);
    return snap;
}

void write_ledger_csv(const std::string& path, const EnergyLedger& ledger,
                      const std::string& config_hash) {
    CsvWriter csv(path, {"t", "H2", "V2", "Lr1", "AH2", "fu"}, config_hash);
    for (std::size_t m = 0; m < ledger.size(); ++m)
        csv.row({CsvWriter::num(ledger.t[m]), CsvWriter::num(ledger.h2[m]),
                 CsvWriter::num(ledger.v2[m]), CsvWriter::num(ledger.lr1[m]),
                 CsvWriter::num(ledger.ah2[m]), CsvWriter::num(ledger.fu[m])});
}

}  // namespace cbf
