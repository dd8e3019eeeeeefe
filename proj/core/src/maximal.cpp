#include "omerg/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace omerg {

double FiniteSignal::at(std::int64_t j) const {
    if (j < offset || j >= end())
        return 0.0;
    return values[static_cast<std::size_t>(j - offset)];
}

double FiniteSignal::mass() const {
    ExactSum s;
    for (double v : values)
        s.add(v);
    return s.value();
}

bool FiniteSignal::empty() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
}

void FiniteSignal::validate() const {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || values[i] < 0.0) {
            std::ostringstream os;
            os << "signal value at " << offset + static_cast<std::int64_t>(i)
               << " must be finite and non-negative";
            throw std::invalid_argument(os.str());
        }
    }
}

FiniteSignal FiniteSignal::from_points(std::span<const std::pair<std::int64_t, double>> points) {
    FiniteSignal s;
    if (points.empty())
        return s;
    std::map<std::int64_t, double> sorted;
    for (const auto& [j, v] : points) {
        if (!sorted.emplace(j, v).second)
            throw std::invalid_argument("duplicate signal offset " + std::to_string(j));
    }
    s.offset = sorted.begin()->first;
    s.values.assign(static_cast<std::size_t>(sorted.rbegin()->first - s.offset + 1), 0.0);
    for (const auto& [j, v] : sorted)
        s.values[static_cast<std::size_t>(j - s.offset)] = v;
    s.validate();
    return s;
}

FiniteSignal FiniteSignal::parse(const std::string& text) {
    std::vector<std::pair<std::int64_t, double>> points;
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        std::int64_t j;
        double v;
        if (!(ls >> j)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos)
                continue;
            throw std::invalid_argument("signal line " + std::to_string(lineno) + ": expected 'offset value'");
        }
        std::string rest;
        if (!(ls >> v) || (ls >> rest))
            throw std::invalid_argument("signal line " + std::to_string(lineno) + ": expected 'offset value'");
        points.emplace_back(j, v);
    }
    return from_points(points);
}

FiniteSignal FiniteSignal::read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open signal file " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return parse(os.str());
}

MaximalGrid MaximalGrid::from_tables(std::span<const WeightTable> tables) {
    MaximalGrid g;
    for (const auto& t : tables) {
        MaximalScale s;
        s.n = t.n;
        s.loglog = loglog(t.n);
        s.window = static_cast<unsigned>(std::floor(2.0 * s.loglog));
        s.eta.assign(s.window, 0.0);
        for (unsigned k = 1; k <= s.window && k <= t.k_max; ++k)
            s.eta[k - 1] = t.eta[k];
        g.scales.push_back(std::move(s));
    }
    std::sort(g.scales.begin(), g.scales.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
    return g;
}

unsigned MaximalGrid::max_window() const {
    unsigned w = 0;
    for (const auto& s : scales)
        w = std::max(w, s.window);
    return w;
}

double window_average(const FiniteSignal& phi, std::int64_t j, const MaximalScale& scale) {
    double sum = 0.0;
    for (unsigned k = 1; k <= scale.window; ++k)
        sum += scale.eta[k - 1] * phi.at(j + k);
    return sum / scale.loglog;
}

double maximal_value(const FiniteSignal& phi, std::int64_t j, const MaximalGrid& grid) {
    if (grid.scales.empty())
        throw std::invalid_argument("maximal_value: empty N grid");
    double best = 0.0;
    for (const auto& s : grid.scales)
        best = std::max(best, window_average(phi, j, s));
    return best;
}

std::vector<std::int64_t> exceedance_set(const FiniteSignal& phi, double lambda, const MaximalGrid& grid) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("exceedance threshold must be positive");
    if (grid.scales.empty())
        throw std::invalid_argument("exceedance_set: empty N grid");
    std::vector<std::int64_t> out;
    if (phi.values.empty())
        return out;
    // windows reach j+1 .. j+max_window, so only these j can see the support
    const std::int64_t lo = phi.offset - grid.max_window();
    for (std::int64_t j = lo; j < phi.end(); ++j)
        if (maximal_value(phi, j, grid) > lambda)
            out.push_back(j);
    return out;
}

CoverCertificate greedy_cover(const FiniteSignal& phi, double lambda, const MaximalGrid& grid,
                              double eta1_upper) {
    CoverCertificate cert;
    cert.lambda = lambda;
    cert.d = 2.0 * eta1_upper;
    cert.exceedance = exceedance_set(phi, lambda, grid);
    std::size_t i = 0;
    while (i < cert.exceedance.size()) {
        const std::int64_t j = cert.exceedance[i];
        const MaximalScale* witness = nullptr;
        for (const auto& s : grid.scales) {
            if (window_average(phi, j, s) > lambda) {
                witness = &s;
                break;
            }
        }
        if (witness == nullptr)
            throw std::logic_error("greedy_cover: j=" + std::to_string(j) + " lacks a witness N");
        const CoverInterval iv{j, j + static_cast<std::int64_t>(witness->window), witness->n};
        cert.intervals.push_back(iv);
        while (i < cert.exceedance.size() && cert.exceedance[i] <= iv.hi)
            ++i;
    }
    return cert;
}

Weak11Report weak11_verify(const FiniteSignal& phi, const CoverCertificate& certificate) {
    Weak11Report r;
    r.mass = phi.mass();
    r.exceedance_size = certificate.exceedance.size();
    r.bound_value = certificate.d * r.mass / certificate.lambda;

    auto ivs = certificate.intervals;
    std::sort(ivs.begin(), ivs.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
    for (std::size_t k = 0; k < ivs.size(); ++k) {
        if (ivs[k].hi < ivs[k].lo || (k > 0 && ivs[k].lo <= ivs[k - 1].hi))
            r.disjoint = false;
    }
    for (const auto j : certificate.exceedance) {
        const auto it = std::upper_bound(ivs.begin(), ivs.end(), j,
                                         [](std::int64_t v, const CoverInterval& iv) { return v < iv.lo; });
        if (it == ivs.begin() || std::prev(it)->hi < j) {
            r.covers = false;
            break;
        }
    }
    r.bound = static_cast<double>(r.exceedance_size) <= r.bound_value;
    return r;
}

}  // namespace omerg
