#pragma once

#include <string>
#include <string_view>

namespace sparselab {

enum class PenaltyFamily { hard, soft, scad, mcp };

// Folded-concave penalty P_{lambda,gamma}(|t|). gamma is only read for
// scad (gamma > 2) and mcp (gamma >= 1).
struct PenaltySpec {
  PenaltyFamily family = PenaltyFamily::soft;
  double lambda = 1.0;
  double gamma = 0.0;

  static PenaltySpec soft(double lambda) { return {PenaltyFamily::soft, lambda, 0.0}; }
  static PenaltySpec hard(double lambda) { return {PenaltyFamily::hard, lambda, 0.0}; }
  static PenaltySpec scad(double lambda, double gamma) { return {PenaltyFamily::scad, lambda, gamma}; }
  static PenaltySpec mcp(double lambda, double gamma) { return {PenaltyFamily::mcp, lambda, gamma}; }

  PenaltySpec with_lambda(double l) const { return {family, l, gamma}; }
};

void validate(const PenaltySpec& spec);

// Parses "soft", "hard", "scad:GAMMA" or "mcp:GAMMA".
PenaltySpec parse_penalty(std::string_view text, double lambda);
std::string to_string(const PenaltySpec& spec);
std::string_view family_name(PenaltyFamily family);

// P(|t|); zero at the origin and symmetric.
//
//   soft  lambda |t|
//   hard  (lambda^2 - (lambda - |t|)_+^2) / 2
//   scad  lambda |t|                                        |t| <= lambda
//         (2 gamma lambda |t| - t^2 - lambda^2) / (2(gamma-1))   lambda < |t| <= gamma lambda
//         lambda^2 (gamma + 1) / 2                           otherwise
//   mcp   lambda |t| - t^2 / (2 gamma)                       |t| <= gamma lambda
//         gamma lambda^2 / 2                                 otherwise
//
// The hard penalty is scaled so that mcp with gamma = 1 coincides with it
// and its proximal map at unit step is hard thresholding at lambda.
double penalty_value(const PenaltySpec& spec, double t);

// Right derivative P'(t) for t >= 0; lies in [0, lambda].
double penalty_derivative(const PenaltySpec& spec, double t);

// Global minimizer of 0.5 (z - b)^2 + step * P(|b|). When two minimizers
// tie, the one of larger magnitude wins; the sign always follows z.
double prox(const PenaltySpec& spec, double z, double step);

// 0.5 (z - b)^2 + step * P(|b|); the scalar objective prox minimizes.
double prox_objective(const PenaltySpec& spec, double z, double step, double b);

}  // namespace sparselab
