#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace topt {

enum class KappaVariant { Penalized, Saturating };

/// Density-to-coefficient interpolation. The default variant is the
/// penalized kappa(s) = (1 - e^{-a s})^{-p}, which diverges at s = 0;
/// the saturating variant (1 - e^{-a s})^{p} is bounded and increasing.
struct KappaParams {
    double a = 1.3;
    double p = 3.0;
    KappaVariant variant = KappaVariant::Penalized;
    double sensitivity_scale = -0.5;
    double density_floor = 1e-9;
    // Conditioning cap for the penalized variant: deep-void coefficients are
    // clipped so the state matrix stays factorable in double precision. The
    // capped region behaves as a fully equilibrated (superconducting) void.
    double kappa_cap = 1e12;

    void validate() const {
        if (!(a > 0) || !(p > 0)) throw std::invalid_argument("kappa: a and p must be positive");
        if (!(kappa_cap > 1)) throw std::invalid_argument("kappa: cap must exceed 1");
    }
};

inline double kappa(double s, const KappaParams& kp) {
    if (s <= 0 && kp.variant == KappaVariant::Penalized)
        throw std::domain_error("kappa: nonpositive density for the penalized variant");
    double base = 1.0 - std::exp(-kp.a * s);
    if (kp.variant != KappaVariant::Penalized) return std::pow(base, kp.p);
    return std::min(std::pow(base, -kp.p), kp.kappa_cap);
}

inline double kappa_prime(double s, const KappaParams& kp) {
    if (s <= 0 && kp.variant == KappaVariant::Penalized)
        throw std::domain_error("kappa_prime: nonpositive density for the penalized variant");
    double e = std::exp(-kp.a * s);
    double base = 1.0 - e;
    if (kp.variant != KappaVariant::Penalized) return kp.p * kp.a * e * std::pow(base, kp.p - 1.0);
    // flat (zero slope) wherever the cap is active
    if (std::pow(base, -kp.p) >= kp.kappa_cap) return 0.0;
    return -kp.p * kp.a * e * std::pow(base, -kp.p - 1.0);
}

/// Densities are floored before kappa sees them; the evolved density itself
/// is never clamped.
inline double floor_density(double s, const KappaParams& kp) {
    return s < kp.density_floor ? kp.density_floor : s;
}

}  // namespace topt
