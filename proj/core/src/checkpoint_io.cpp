#include "omerg/checkpoint_io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace omerg {

namespace fs = std::filesystem;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_edge(double v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ','))
        out.push_back(cell);
    return out;
}

std::uint64_t parse_u64(const std::string& s, const fs::path& where, std::size_t line) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty() || s[0] == '-')
        throw std::runtime_error(where.string() + ":" + std::to_string(line) + ": bad integer '" + s + "'");
    return v;
}

double parse_real(const std::string& s, const fs::path& where, std::size_t line) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty())
        throw std::runtime_error(where.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
    return v;
}

}  // namespace

std::string config_hash(std::uint64_t n_max, std::span<const std::uint64_t> checkpoints) {
    std::string key = std::to_string(n_max) + ";";
    for (std::size_t i = 0; i < checkpoints.size(); ++i)
        key += (i ? "," : "") + std::to_string(checkpoints[i]);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : key) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

fs::path run_directory(const fs::path& out, std::uint64_t n_max, std::span<const std::uint64_t> checkpoints) {
    return out / ("run_n" + std::to_string(n_max) + "_" + config_hash(n_max, checkpoints));
}

std::string checkpoint_csv(const WeightTable& table) {
    std::string s = "N,k,pi,xi,eta\n";
    for (unsigned k = 0; k <= table.k_max; ++k) {
        s += std::to_string(table.n) + "," + std::to_string(k) + "," + std::to_string(table.pi[k]) + "," +
             fmt17(table.xi[k]) + "," + fmt17(table.eta[k]) + "\n";
    }
    return s;
}

std::string histogram_csv(const WeightTable& table) {
    const auto& h = table.ek_hist;
    const std::string n = std::to_string(table.n);
    std::string s = "N,bin_lo,bin_hi,count\n";
    s += n + ",-inf," + fmt_edge(StandardHistogram::edge(0)) + "," + std::to_string(h.underflow) + "\n";
    for (int i = 0; i < StandardHistogram::kBins; ++i) {
        s += n + "," + fmt_edge(StandardHistogram::edge(i)) + "," + fmt_edge(StandardHistogram::edge(i + 1)) + "," +
             std::to_string(h.bins[static_cast<std::size_t>(i)]) + "\n";
    }
    s += n + "," + fmt_edge(StandardHistogram::edge(StandardHistogram::kBins)) + ",inf," +
         std::to_string(h.overflow) + "\n";
    return s;
}

fs::path checkpoint_path(const fs::path& dir, std::uint64_t n) {
    return dir / ("checkpoint_" + std::to_string(n) + ".csv");
}

fs::path histogram_path(const fs::path& dir, std::uint64_t n) {
    return dir / ("histogram_" + std::to_string(n) + ".csv");
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    out.close();
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_checkpoint(const fs::path& dir, const WeightTable& table) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    write_text(checkpoint_path(dir, table.n), checkpoint_csv(table));
    write_text(histogram_path(dir, table.n), histogram_csv(table));
}

WeightTable read_checkpoint(const fs::path& csv) {
    std::istringstream in(read_text(csv));
    std::string line;
    if (!std::getline(in, line) || line != "N,k,pi,xi,eta")
        throw std::runtime_error(csv.string() + ": missing header N,k,pi,xi,eta");
    WeightTable t;
    std::size_t lineno = 1;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        const auto cells = split_csv(line);
        if (cells.size() != 5)
            throw std::runtime_error(csv.string() + ":" + std::to_string(lineno) + ": expected 5 columns");
        const auto n = parse_u64(cells[0], csv, lineno);
        const auto k = parse_u64(cells[1], csv, lineno);
        if (first) {
            t.n = n;
            first = false;
        } else if (n != t.n) {
            throw std::runtime_error(csv.string() + ":" + std::to_string(lineno) + ": N changes within file");
        }
        if (k != t.pi.size())
            throw std::runtime_error(csv.string() + ":" + std::to_string(lineno) + ": k out of sequence");
        t.pi.push_back(parse_u64(cells[2], csv, lineno));
        t.xi.push_back(parse_real(cells[3], csv, lineno));
        t.eta.push_back(parse_real(cells[4], csv, lineno));
    }
    if (t.pi.empty())
        throw std::runtime_error(csv.string() + ": no rows");
    t.k_max = static_cast<unsigned>(t.pi.size() - 1);
    t.rebuild_histogram();
    return t;
}

StandardHistogram read_histogram(const fs::path& csv) {
    std::istringstream in(read_text(csv));
    std::string line;
    if (!std::getline(in, line) || line != "N,bin_lo,bin_hi,count")
        throw std::runtime_error(csv.string() + ": missing header N,bin_lo,bin_hi,count");
    std::vector<std::uint64_t> counts;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        const auto cells = split_csv(line);
        if (cells.size() != 4)
            throw std::runtime_error(csv.string() + ":" + std::to_string(lineno) + ": expected 4 columns");
        counts.push_back(parse_u64(cells[3], csv, lineno));
    }
    if (counts.size() != StandardHistogram::kBins + 2)
        throw std::runtime_error(csv.string() + ": expected " + std::to_string(StandardHistogram::kBins + 2) + " rows");
    StandardHistogram h;
    h.underflow = counts.front();
    h.overflow = counts.back();
    std::copy(counts.begin() + 1, counts.end() - 1, h.bins.begin());
    return h;
}

std::vector<WeightTable> read_run(const fs::path& dir) {
    std::map<std::uint64_t, fs::path> files;
    std::error_code ec;
    if (fs::is_directory(dir, ec)) {
        for (const auto& entry : fs::directory_iterator(dir)) {
            const auto name = entry.path().filename().string();
            if (name.rfind("checkpoint_", 0) != 0 || entry.path().extension() != ".csv")
                continue;
            const auto digits = name.substr(11, name.size() - 15);
            if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
                continue;
            files.emplace(std::stoull(digits), entry.path());
        }
    } else {
        throw std::runtime_error("no checkpoints found in " + dir.string() + " (not a directory)");
    }
    if (files.empty())
        throw std::runtime_error("no checkpoints found in " + dir.string());
    std::vector<WeightTable> out;
    for (const auto& [n, path] : files) {
        out.push_back(read_checkpoint(path));
        if (out.back().n != n)
            throw std::runtime_error(path.string() + ": N column disagrees with file name");
    }
    return out;
}

}  // namespace omerg
