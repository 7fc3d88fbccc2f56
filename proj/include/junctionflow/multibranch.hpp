#pragma once

#include <functional>
#include <string>
#include <vector>

#include "junctionflow/flux.hpp"

namespace jf {

// A concave flux on [a, c] with f(a) = f(c) = 0 and a positive maximum at m.
// The multi-branch junction is written directly in terms of concave fluxes
// and sup-envelopes rather than by flipping the convex machinery.
class ConcaveFlux {
 public:
  using Fn = std::function<double(double)>;
  ConcaveFlux(double a, double c, double m, Fn f);

  double operator()(double p) const { return f_(p); }
  double a() const { return a_; }
  double c() const { return c_; }
  double argmax() const { return m_; }
  double max_value() const { return max_; }

  // sup of f over [a, q]
  double env_plus(double q) const { return q <= m_ ? f_(q) : max_; }
  // sup of f over [q, c]
  double env_minus(double q) const { return q <= m_ ? max_ : f_(q); }

  // Level-lambda point on the increasing side [a, m] (plus) or on the
  // decreasing side [m, c] (minus).
  double q_plus(double lambda) const;
  double q_minus(double lambda) const;

 private:
  double a_, c_, m_, max_;
  Fn f_;
};

// f(p) = kappa (p - a)(c - p)
ConcaveFlux make_concave_quadratic(double a, double c, double kappa);

struct WeightedBranch {
  ConcaveFlux flux;
  double theta;
};

// Incoming branches come first in every flattened vector of slopes.
class MultiBranchJunction {
 public:
  MultiBranchJunction(std::vector<WeightedBranch> incoming, std::vector<WeightedBranch> outgoing);

  const std::vector<WeightedBranch>& incoming() const { return in_; }
  const std::vector<WeightedBranch>& outgoing() const { return out_; }
  std::size_t size() const { return in_.size() + out_.size(); }
  bool is_incoming(std::size_t alpha) const { return alpha < in_.size(); }
  const WeightedBranch& branch(std::size_t alpha) const {
    return alpha < in_.size() ? in_[alpha] : out_[alpha - in_.size()];
  }
  // min over branches of max f
  double A0() const { return A0_; }

 private:
  std::vector<WeightedBranch> in_, out_;
  double A0_;
};

bool multibranch_germ_contains(const MultiBranchJunction& J, double A, const std::vector<double>& p);

// IN - OUT for the entropy fluxes of the pair (p', p).
double multibranch_dissipation_gap(const MultiBranchJunction& J, const std::vector<double>& pPrime,
                                   const std::vector<double>& p);

struct Counterexample {
  std::vector<double> pPrime;
  std::vector<double> p;
  std::size_t alpha0 = 0;  // branch actually used
  double gap = 0.0;
};

// Pair of germ elements violating IN >= OUT on a junction with at least three
// branches. When the requested alpha0 carries weight 1 the construction
// degenerates (gap zero); the first branch on the other side is used instead.
Counterexample dissipation_counterexample(const MultiBranchJunction& J, double A, double lambda,
                                          std::size_t alpha0);

}  // namespace jf
