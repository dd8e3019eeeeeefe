#include "omerg/dynamics.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace omerg {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep))
        out.push_back(cur);
    if (!s.empty() && s.back() == sep)
        out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size())
        throw std::invalid_argument("not a number: " + s);
    return v;
}

std::uint64_t to_u64(const std::string& s) {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size())
        throw std::invalid_argument("not an integer: " + s);
    return v;
}

std::set<std::uint64_t> parse_set(const std::string& s) {
    std::set<std::uint64_t> out;
    for (const auto& item : split(s, ','))
        if (!trim(item).empty())
            out.insert(to_u64(trim(item)));
    return out;
}

std::vector<double> parse_values(const std::string& s) {
    std::vector<double> out;
    for (const auto& item : split(s, ','))
        if (!trim(item).empty())
            out.push_back(to_double(trim(item)));
    return out;
}

}  // namespace

void validate(const DynamicalSystem& system) {
    std::visit(overloaded{
                   [](const PeriodicSystem& p) {
                       if (p.modulus < 2)
                           throw std::invalid_argument("periodic system needs modulus >= 2");
                       for (auto e : p.target)
                           if (e >= p.modulus)
                               throw std::invalid_argument("periodic target outside Z/m");
                   },
                   [](const RotationSystem& r) {
                       if (!(r.alpha > 0.0 && r.alpha < 1.0))
                           throw std::invalid_argument("rotation angle must lie in (0, 1)");
                       if (!(r.x0 >= 0.0 && r.x0 < 1.0))
                           throw std::invalid_argument("rotation start must lie in [0, 1)");
                       if (!(r.a >= 0.0 && r.a <= r.b && r.b <= 1.0))
                           throw std::invalid_argument("rotation interval must satisfy 0 <= a <= b <= 1");
                   },
                   [](const TableSystem& t) {
                       if (t.values.empty())
                           throw std::invalid_argument("table system is empty");
                   },
               },
               system);
}

OrbitTable orbit_values(const DynamicalSystem& system, std::uint64_t k_max) {
    validate(system);
    OrbitTable orbit;
    orbit.values.resize(k_max + 1);
    std::visit(overloaded{
                   [&](const PeriodicSystem& p) {
                       std::uint64_t x = p.start % p.modulus;
                       for (auto& v : orbit.values) {
                           v = p.target.contains(x) ? 1.0 : 0.0;
                           if (++x == p.modulus)
                               x = 0;
                       }
                       orbit.ground_truth_mean =
                           static_cast<double>(p.target.size()) / static_cast<double>(p.modulus);
                   },
                   [&](const RotationSystem& r) {
                       for (std::uint64_t k = 0; k <= k_max; ++k) {
                           const double t = r.x0 + static_cast<double>(k) * r.alpha;
                           const double x = t - std::floor(t);
                           orbit.values[k] = (x >= r.a && x < r.b) ? 1.0 : 0.0;
                       }
                       orbit.ground_truth_mean = r.b - r.a;
                   },
                   [&](const TableSystem& t) {
                       double sum = 0.0;
                       for (std::uint64_t k = 0; k <= k_max; ++k)
                           orbit.values[k] = t.values[k % t.values.size()];
                       for (auto v : t.values)
                           sum += v;
                       orbit.ground_truth_mean = sum / static_cast<double>(t.values.size());
                   },
               },
               system);
    return orbit;
}

double birkhoff_average(const OrbitTable& orbit, std::uint64_t k) {
    if (k == 0 || k > orbit.values.size())
        throw std::out_of_range("birkhoff_average: K outside the tabulated orbit");
    double sum = 0.0;
    for (std::uint64_t i = 0; i < k; ++i)
        sum += orbit.values[i];
    return sum / static_cast<double>(k);
}

DynamicalSystem parse_system(const std::string& spec) {
    const auto parts = split(spec, ':');
    if (parts.empty())
        throw std::invalid_argument("empty system spec");
    const auto& kind = parts[0];
    if (kind == "periodic") {
        PeriodicSystem p;
        if (parts.size() > 1)
            p.modulus = to_u64(parts[1]);
        if (parts.size() > 2)
            p.start = to_u64(parts[2]);
        if (parts.size() > 3)
            p.target = parse_set(parts[3]);
        if (parts.size() > 4)
            throw std::invalid_argument("too many fields in periodic spec");
        validate(p);
        return p;
    }
    if (kind == "rotation") {
        RotationSystem r;
        if (parts.size() > 1)
            r.alpha = to_double(parts[1]);
        if (parts.size() > 2)
            r.x0 = to_double(parts[2]);
        if (parts.size() > 3)
            r.a = to_double(parts[3]);
        if (parts.size() > 4)
            r.b = to_double(parts[4]);
        if (parts.size() > 5)
            throw std::invalid_argument("too many fields in rotation spec");
        validate(r);
        return r;
    }
    if (kind == "table") {
        if (parts.size() != 2)
            throw std::invalid_argument("table spec is table:v0,v1,...");
        TableSystem t{parse_values(parts[1])};
        validate(t);
        return t;
    }
    throw std::invalid_argument("unknown system kind: " + kind);
}

DynamicalSystem parse_system_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("expected key=value, got: " + line);
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    const auto kind = kv.contains("system") ? kv["system"] : std::string{};
    if (kind == "periodic") {
        PeriodicSystem p;
        if (kv.contains("modulus"))
            p.modulus = to_u64(kv["modulus"]);
        if (kv.contains("start"))
            p.start = to_u64(kv["start"]);
        if (kv.contains("target"))
            p.target = parse_set(kv["target"]);
        validate(p);
        return p;
    }
    if (kind == "rotation") {
        RotationSystem r;
        if (kv.contains("alpha"))
            r.alpha = to_double(kv["alpha"]);
        if (kv.contains("x0"))
            r.x0 = to_double(kv["x0"]);
        if (kv.contains("a"))
            r.a = to_double(kv["a"]);
        if (kv.contains("b"))
            r.b = to_double(kv["b"]);
        validate(r);
        return r;
    }
    if (kind == "table") {
        TableSystem t{parse_values(kv["values"])};
        validate(t);
        return t;
    }
    throw std::invalid_argument("system config needs system=periodic|rotation|table");
}

std::string describe(const DynamicalSystem& system) {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const PeriodicSystem& p) {
                       os << "periodic:" << p.modulus << ':' << p.start << ':';
                       bool first = true;
                       for (auto e : p.target) {
                           os << (first ? "" : ",") << e;
                           first = false;
                       }
                   },
                   [&](const RotationSystem& r) {
                       os.precision(17);
                       os << "rotation:" << r.alpha << ':' << r.x0 << ':' << r.a << ':' << r.b;
                   },
                   [&](const TableSystem& t) { os << "table:" << t.values.size() << " values"; },
               },
               system);
    return os.str();
}

}  // namespace omerg
