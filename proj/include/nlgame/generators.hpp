/**
 * @file generators.hpp
 * @brief Drivers g(t, y, z, s) of the wealth dynamics and of the BSDEs.
 *
 * Wealth drifts by -g dt. For the funding builtins the cash position is
 * a = y - z s; positive cash earns r_lend and negative cash pays r_borrow,
 * so g = -r_lend a^+ + r_borrow a^-.
 */

#ifndef NLGAME_GENERATORS_HPP
#define NLGAME_GENERATORS_HPP

#include "nlgame/errors.hpp"
#include "nlgame/model_core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <variant>

namespace nlgame {

struct ZeroDriver {
    double operator()(double, double, double, double) const noexcept { return 0.0; }
};

struct LinearRateDriver {
    double rate = 0.0;
    double operator()(double, double y, double z, double s) const noexcept { return -rate * (y - z * s); }
};

struct DifferentialRatesDriver {
    double r_lend = 0.0;
    double r_borrow = 0.0;
    double operator()(double, double y, double z, double s) const noexcept {
        const double cash = y - z * s;
        return -r_lend * std::max(cash, 0.0) + r_borrow * std::max(-cash, 0.0);
    }
};

/// User-supplied pure driver with declared Lipschitz bounds:
/// |g(y2) - g(y1)| <= lipschitz_y |y2 - y1| and |g(z2) - g(z1)| <= lipschitz_z s |z2 - z1|.
struct CustomDriver {
    std::function<double(double, double, double, double)> fn;
    double lipschitz_y = 0.0;
    double lipschitz_z = 0.0;
    std::string name = "custom";
    double operator()(double t, double y, double z, double s) const { return fn(t, y, z, s); }
};

class GeneratorSpec {
public:
    using Variant = std::variant<ZeroDriver, LinearRateDriver, DifferentialRatesDriver, CustomDriver>;

    GeneratorSpec() = default;

    static GeneratorSpec zero() { return GeneratorSpec(ZeroDriver{}); }

    static GeneratorSpec linear(double rate) {
        if (!std::isfinite(rate) || rate < 0.0) throw Error(ErrorKind::InvalidParameters, "rate must be >= 0");
        return GeneratorSpec(LinearRateDriver{rate});
    }

    static GeneratorSpec differential(double r_lend, double r_borrow) {
        if (!std::isfinite(r_lend) || !std::isfinite(r_borrow) || r_lend < 0.0 || r_borrow < 0.0)
            throw Error(ErrorKind::InvalidParameters, "funding rates must be finite and >= 0");
        return GeneratorSpec(DifferentialRatesDriver{r_lend, r_borrow});
    }

    static GeneratorSpec custom(std::function<double(double, double, double, double)> fn, double lipschitz_y,
                                double lipschitz_z, std::string name = "custom") {
        if (!fn) throw Error(ErrorKind::InvalidParameters, "custom generator needs a callable");
        if (!std::isfinite(lipschitz_y) || !std::isfinite(lipschitz_z) || lipschitz_y < 0.0 || lipschitz_z < 0.0)
            throw Error(ErrorKind::InvalidParameters, "declared Lipschitz bounds must be finite and >= 0");
        return GeneratorSpec(CustomDriver{std::move(fn), lipschitz_y, lipschitz_z, std::move(name)});
    }

    const Variant& driver() const noexcept { return driver_; }

    double lipschitz_y() const noexcept {
        return std::visit(
            [](const auto& g) -> double {
                using G = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<G, ZeroDriver>) return 0.0;
                else if constexpr (std::is_same_v<G, LinearRateDriver>) return g.rate;
                else if constexpr (std::is_same_v<G, DifferentialRatesDriver>) return std::max(g.r_lend, g.r_borrow);
                else return g.lipschitz_y;
            },
            driver_);
    }

    double lipschitz_z() const noexcept {
        return std::visit(
            [](const auto& g) -> double {
                using G = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<G, CustomDriver>) return g.lipschitz_z;
                else if constexpr (std::is_same_v<G, ZeroDriver>) return 0.0;
                else return GeneratorSpec::builtin_z_bound(g);
            },
            driver_);
    }

    std::string name() const {
        return std::visit(
            [](const auto& g) -> std::string {
                using G = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<G, ZeroDriver>) return "zero";
                else if constexpr (std::is_same_v<G, LinearRateDriver>) return "linear";
                else if constexpr (std::is_same_v<G, DifferentialRatesDriver>) return "differential";
                else return g.name;
            },
            driver_);
    }

    /// Unchecked evaluation.
    double operator()(double t, double y, double z, double s) const {
        return std::visit([&](const auto& g) { return g(t, y, z, s); }, driver_);
    }

private:
    explicit GeneratorSpec(Variant v) : driver_(std::move(v)) {}

    static double builtin_z_bound(const LinearRateDriver& g) noexcept { return g.rate; }
    static double builtin_z_bound(const DifferentialRatesDriver& g) noexcept { return std::max(g.r_lend, g.r_borrow); }

    Variant driver_ = ZeroDriver{};
};

/// Checked evaluation of g.
inline double eval_g(const GeneratorSpec& gen, double t, double y, double z, double s) {
    if (!std::isfinite(t) || !std::isfinite(y) || !std::isfinite(z) || !std::isfinite(s))
        throw Error(ErrorKind::NonFiniteInput, "generator called with a non-finite argument");
    const double value = gen(t, y, z, s);
    if (!std::isfinite(value)) throw Error(ErrorKind::NonFiniteInput, "generator '" + gen.name() + "' returned a non-finite value");
    return value;
}

/// Implicit-in-y step is a contraction: dt * lipschitz_y < 1.
inline bool contraction_ok(const GeneratorSpec& gen, double dt) {
    if (!(dt > 0.0)) throw Error(ErrorKind::InvalidParameters, "dt must be positive");
    return dt * gen.lipschitz_y() < 1.0;
}

/**
 * Contraction plus strict monotonicity of the one-step scheme in both
 * continuation values on this lattice. The z-sensitivity of the step is
 * bounded by lipschitz_z dt / (u - d), which must stay below both
 * q = (1 - d)/(u - d) and 1 - q = (u - 1)/(u - d).
 */
inline bool contraction_ok(const GeneratorSpec& gen, const Lattice& lat) {
    if (!contraction_ok(gen, lat.dt())) return false;
    const double z_term = gen.lipschitz_z() * lat.dt();
    return z_term < std::min(lat.up() - 1.0, 1.0 - lat.down());
}

inline void require_contraction(const GeneratorSpec& gen, const Lattice& lat) {
    if (!contraction_ok(gen, lat))
        throw Error(ErrorKind::ContractionViolated,
                    "generator '" + gen.name() + "' with lipschitz_y=" + std::to_string(gen.lipschitz_y()) +
                        ", lipschitz_z=" + std::to_string(gen.lipschitz_z()) +
                        " is not a monotone contraction at dt=" + std::to_string(lat.dt()));
}

}  // namespace nlgame

#endif  // NLGAME_GENERATORS_HPP
