#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "radgreen/error.hpp"
#include "radgreen/grid.hpp"

namespace radgreen {

struct ConstantPotential {
    double lambda = 1.0;
};

/// base + amplitude * exp(-((r - center)/width)^2)
struct BumpPotential {
    double base = 0.0;
    double amplitude = 1.0;
    double center = 0.5;
    double width = 0.1;
};

/// Samples (r, V) on [0, 1] joined by a monotone (Fritsch-Carlson) cubic.
class TabulatedPotential {
public:
    TabulatedPotential(std::vector<double> r, std::vector<double> v) : r_(std::move(r)), v_(std::move(v)) {
        if (r_.size() != v_.size() || r_.size() < 2)
            throw ConfigError("tabulated potential needs at least two (r, V) samples");
        for (std::size_t i = 1; i < r_.size(); ++i)
            if (!(r_[i] > r_[i - 1])) throw ConfigError("tabulated potential: r must be strictly increasing");
        if (r_.front() > 0.0 || r_.back() < 1.0)
            throw ConfigError("tabulated potential must cover [0, 1]");
        for (double x : v_)
            if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("tabulated potential has a negative or non-finite value");
        build_slopes();
    }

    double operator()(double r) const {
        if (r <= r_.front()) return v_.front();
        if (r >= r_.back()) return v_.back();
        const auto k = static_cast<std::size_t>(std::upper_bound(r_.begin(), r_.end(), r) - r_.begin()) - 1;
        const double h = r_[k + 1] - r_[k];
        const double t = (r - r_[k]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * v_[k] + (t3 - 2 * t2 + t) * h * m_[k] + (-2 * t3 + 3 * t2) * v_[k + 1] +
               (t3 - t2) * h * m_[k + 1];
    }

    const std::vector<double>& radii() const { return r_; }
    const std::vector<double>& values() const { return v_; }

private:
    void build_slopes() {
        const std::size_t N = r_.size();
        std::vector<double> delta(N - 1);
        for (std::size_t k = 0; k + 1 < N; ++k) delta[k] = (v_[k + 1] - v_[k]) / (r_[k + 1] - r_[k]);
        m_.assign(N, 0.0);
        m_[0] = delta[0];
        m_[N - 1] = delta[N - 2];
        for (std::size_t k = 1; k + 1 < N; ++k)
            m_[k] = (delta[k - 1] * delta[k] <= 0.0) ? 0.0 : 0.5 * (delta[k - 1] + delta[k]);
        for (std::size_t k = 0; k + 1 < N; ++k) {
            if (delta[k] == 0.0) {
                m_[k] = m_[k + 1] = 0.0;
                continue;
            }
            const double a = m_[k] / delta[k], b = m_[k + 1] / delta[k];
            if (a < 0.0) m_[k] = 0.0;
            if (b < 0.0) m_[k + 1] = 0.0;
            const double s = a * a + b * b;
            if (s > 9.0) {
                const double tau = 3.0 / std::sqrt(s);
                m_[k] = tau * a * delta[k];
                m_[k + 1] = tau * b * delta[k];
            }
        }
    }

    std::vector<double> r_, v_, m_;
};

/// Radial potential V(r) >= 0, V not identically zero.
class PotentialSpec {
public:
    using Variant = std::variant<ConstantPotential, BumpPotential, TabulatedPotential>;

    PotentialSpec(ConstantPotential c) : v_(c) {
        require(c.lambda > 0.0, "constant potential must be positive");
    }
    PotentialSpec(BumpPotential b) : v_(b) {
        require(b.base >= 0.0, "bump base must be >= 0");
        require(b.amplitude > 0.0, "bump amplitude must be > 0");
        require(b.center > 0.0 && b.center < 1.0, "bump center must lie in (0, 1)");
        require(b.width > 0.0, "bump width must be > 0");
    }
    PotentialSpec(TabulatedPotential t) : v_(std::move(t)) {
        const auto& vals = std::get<TabulatedPotential>(v_).values();
        if (*std::max_element(vals.begin(), vals.end()) <= 0.0)
            throw ConfigError("tabulated potential is identically zero");
    }

    static PotentialSpec constant(double lambda) { return PotentialSpec(ConstantPotential{lambda}); }
    static PotentialSpec bump(double base, double amplitude, double center, double width) {
        return PotentialSpec(BumpPotential{base, amplitude, center, width});
    }

    double operator()(double r) const {
        return std::visit(
            [r](const auto& p) -> double {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, ConstantPotential>) {
                    return p.lambda;
                } else if constexpr (std::is_same_v<T, BumpPotential>) {
                    const double z = (r - p.center) / p.width;
                    return p.base + p.amplitude * std::exp(-z * z);
                } else {
                    return p(r);
                }
            },
            v_);
    }

    bool is_constant() const { return std::holds_alternative<ConstantPotential>(v_); }
    double constant_value() const { return std::get<ConstantPotential>(v_).lambda; }
    const Variant& variant() const { return v_; }

    /// Values at the grid nodes; checks V >= 0 and max V > 0.
    std::vector<double> sample(const RadialGrid& grid) const {
        std::vector<double> out(grid.size());
        double vmax = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            out[i] = (*this)(grid.node(i));
            if (!(out[i] >= 0.0)) throw DomainError("potential is negative on the grid");
            vmax = std::max(vmax, out[i]);
        }
        if (vmax <= 0.0) throw DomainError("potential vanishes identically on the grid");
        return out;
    }

    /// Shorthand used by the CLI: const:L, bump:B,A,C,W, file:PATH.
    std::string describe() const;

private:
    Variant v_;
};

namespace detail {

inline std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

inline double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse " + what + " from '" + s + "'");
    }
}

}  // namespace detail

/// Reads a CSV file with header `r,V` and rows sorted by r.
inline TabulatedPotential load_potential_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open potential file '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != "r,V")
        throw ConfigError("potential file '" + path + "' must start with header r,V");
    std::vector<double> r, v;
    while (std::getline(in, line)) {
        line = detail::trim(line);
        if (line.empty()) continue;
        auto cols = detail::split(line, ',');
        if (cols.size() != 2) throw ConfigError("potential file row must have two columns: '" + line + "'");
        r.push_back(detail::parse_double(cols[0], "r"));
        v.push_back(detail::parse_double(cols[1], "V"));
    }
    return TabulatedPotential(std::move(r), std::move(v));
}

inline PotentialSpec parse_potential(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw ConfigError("potential spec needs a kind prefix: '" + spec + "'");
    const std::string kind = spec.substr(0, colon), rest = spec.substr(colon + 1);
    try {
        if (kind == "const") return PotentialSpec::constant(detail::parse_double(rest, "constant potential"));
        if (kind == "bump") {
            auto p = detail::split(rest, ',');
            if (p.size() != 4) throw ConfigError("bump potential needs BASE,AMP,CENTER,WIDTH");
            return PotentialSpec::bump(detail::parse_double(p[0], "bump base"), detail::parse_double(p[1], "bump amplitude"),
                                       detail::parse_double(p[2], "bump center"), detail::parse_double(p[3], "bump width"));
        }
        if (kind == "file") return PotentialSpec(load_potential_csv(rest));
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("unknown potential kind '" + kind + "'");
}

inline std::string PotentialSpec::describe() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&os](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ConstantPotential>) {
                os << "const:" << p.lambda;
            } else if constexpr (std::is_same_v<T, BumpPotential>) {
                os << "bump:" << p.base << ',' << p.amplitude << ',' << p.center << ',' << p.width;
            } else {
                os << "tabulated:" << p.radii().size() << " samples";
            }
        },
        v_);
    return os.str();
}

}  // namespace radgreen
