#pragma once

#include <algorithm>
#include <cmath>

#include "stbem/assembly.hpp"
#include "stbem/error.hpp"
#include "stbem/space.hpp"

namespace stbem {

enum class NormVariant { standard, mixed };

/// Weight of the hierarchical block (lx, lt) in the wavelet characterisation
/// of H^{r,s}: 2^{2 max{r lx, s lt}} for r, s >= 0, 2^{-2 max{|r| lx, |s| lt}}
/// for r, s < 0, and 2^{2 (r lx + s lt)} for the mixed-derivative space.
inline double wavelet_weight(const LevelPair& p, double r, double s, NormVariant variant) {
  if (variant == NormVariant::mixed) return std::exp2(2.0 * (r * p.lx + s * p.lt));
  const bool nonneg = r >= 0.0 && s >= 0.0;
  const bool neg = r < 0.0 && s < 0.0;
  if (!nonneg && !neg) throw ConfigError("anisotropic norm needs (r, s) of equal sign; use the mixed variant");
  if (nonneg) return std::exp2(2.0 * std::max(r * p.lx, s * p.lt));
  return std::exp2(-2.0 * std::max(-r * p.lx, -s * p.lt));
}

/// Squared H^{r,s} norm estimate from the hierarchical coefficients.
inline double energy_norm_sq_wavelet(const Density& d, double r, double s, NormVariant variant = NormVariant::standard) {
  require(d.representation == Density::Representation::hierarchical, "wavelet norm needs a hierarchical density");
  double total = 0.0;
  for_each_block(d.space, [&](const LevelPair& p, long off) {
    const long n = d.space.block_size(p);
    total += wavelet_weight(p, r, s, variant) * d.coefficients.segment(off, n).squaredNorm();
  });
  return total;
}

/// <A_ref e, e> with e = reference - approximation, both given on the
/// reference grid.
inline double reference_error_sq(const Vector& approximation, const Vector& reference, const CausalBlockMatrix& A_ref) {
  require(approximation.size() == reference.size() && reference.size() == A_ref.size(),
          "reference error: vectors must live on the reference grid");
  const Vector e = reference - approximation;
  return A_ref.quadratic_form(e);
}

/// Nodal density embedded into a reference grid, then compared.
inline double reference_error_sq(const Density& psi, const Density& reference, const CausalBlockMatrix& A_ref) {
  const Density pn = to_nodal(psi);
  const Density rn = to_nodal(reference);
  const FullGrid fg = rn.space.bounding_grid();
  const Vector up = prolong(pn.space.bounding_grid(), pn.coefficients, fg);
  return reference_error_sq(up, rn.coefficients, A_ref);
}

}  // namespace stbem
