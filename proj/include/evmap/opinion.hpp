#pragma once

#include <algorithm>
#include <cmath>

#include "evmap/errors.hpp"

namespace evmap {

/// Binomial Subjective Logic opinion (belief, disbelief, uncertainty, base rate).
///
/// Values are plain data; every operation below is a pure function.
template <typename Scalar>
struct BinomialOpinion {
  Scalar b{0};
  Scalar d{0};
  Scalar u{1};
  Scalar a{0.5};

  friend bool operator==(const BinomialOpinion&, const BinomialOpinion&) = default;
};

/// Positive and negative evidence counts behind a binomial opinion.
template <typename Scalar>
struct EvidencePair {
  Scalar r{0};
  Scalar s{0};

  EvidencePair& operator+=(const EvidencePair& o) {
    r += o.r;
    s += o.s;
    return *this;
  }
  friend EvidencePair operator+(EvidencePair x, const EvidencePair& y) { return x += y; }
};

using Opinion = BinomialOpinion<double>;
using Evidence = EvidencePair<double>;

// Prior weight W of the binomial domain.
inline constexpr double kDefaultPriorWeight = 2.0;
// Uncertainty floor applied to dogmatic opinions before mapping to evidence.
inline constexpr double kDogmaticEpsilon = 1e-6;
inline constexpr double kBaseRateTolerance = 1e-9;

template <typename Scalar>
bool is_valid(const BinomialOpinion<Scalar>& op, Scalar tol = Scalar(1e-9)) {
  auto in_unit = [tol](Scalar v) { return std::isfinite(v) && v >= -tol && v <= 1 + tol; };
  return in_unit(op.b) && in_unit(op.d) && in_unit(op.u) && in_unit(op.a) &&
         std::abs(op.b + op.d + op.u - 1) <= tol;
}

template <typename Scalar>
constexpr Scalar projected_probability(const BinomialOpinion<Scalar>& op) {
  return op.b + op.a * op.u;
}

template <typename Scalar>
constexpr BinomialOpinion<Scalar> vacuous(Scalar base_rate) {
  return {Scalar(0), Scalar(0), Scalar(1), base_rate};
}

/// Raises u to `eps` and rescales b, d so the masses still sum to one.
template <typename Scalar>
BinomialOpinion<Scalar> clamp_dogmatic(const BinomialOpinion<Scalar>& op,
                                       Scalar eps = Scalar(kDogmaticEpsilon)) {
  if (op.u >= eps) return op;
  const Scalar bd = op.b + op.d;
  if (bd <= Scalar(0)) return vacuous(op.a);
  const Scalar k = (Scalar(1) - eps) / bd;
  return {op.b * k, op.d * k, eps, op.a};
}

/// Maps an opinion into evidence space: r = W b / u, s = W d / u.
///
/// Dogmatic opinions (u == 0) are clamped to u = kDogmaticEpsilon unless
/// `clamp` is false, in which case DogmaticOpinion is thrown.
template <typename Scalar>
EvidencePair<Scalar> to_evidence(const BinomialOpinion<Scalar>& op,
                                 Scalar prior_weight = Scalar(kDefaultPriorWeight),
                                 bool clamp = true) {
  if (op.u <= Scalar(0) && !clamp) throw DogmaticOpinion("opinion has zero uncertainty");
  const auto c = clamp ? clamp_dogmatic(op) : op;
  return {prior_weight * c.b / c.u, prior_weight * c.d / c.u};
}

template <typename Scalar>
BinomialOpinion<Scalar> from_evidence(const EvidencePair<Scalar>& ev, Scalar base_rate,
                                      Scalar prior_weight = Scalar(kDefaultPriorWeight)) {
  const Scalar total = prior_weight + ev.r + ev.s;
  const Scalar b = ev.r / total;
  const Scalar d = ev.s / total;
  // u is taken as the remainder so that b + d + u == 1 holds to rounding.
  return {b, d, Scalar(1) - b - d, base_rate};
}

/// Cumulative fusion: evidence of independent sources is summed.
template <typename Scalar>
BinomialOpinion<Scalar> cumulative_fuse(const BinomialOpinion<Scalar>& x,
                                        const BinomialOpinion<Scalar>& y,
                                        Scalar prior_weight = Scalar(kDefaultPriorWeight)) {
  if (std::abs(x.a - y.a) > Scalar(kBaseRateTolerance)) {
    throw BaseRateMismatch("cumulative fusion requires equal base rates");
  }
  return from_evidence(to_evidence(x, prior_weight) + to_evidence(y, prior_weight), x.a,
                       prior_weight);
}

}  // namespace evmap
