#include "sparselab/penalties.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>

#include "sparselab/error.hpp"

namespace sparselab {

void validate(const PenaltySpec& spec) {
  if (!(std::isfinite(spec.lambda) && spec.lambda > 0.0))
    throw ValidationError("penalty: lambda must be finite and > 0");
  if (spec.family == PenaltyFamily::scad && !(spec.gamma > 2.0))
    throw ValidationError("penalty: scad requires gamma > 2");
  if (spec.family == PenaltyFamily::mcp && !(spec.gamma >= 1.0))
    throw ValidationError("penalty: mcp requires gamma >= 1");
  if ((spec.family == PenaltyFamily::scad || spec.family == PenaltyFamily::mcp) &&
      !std::isfinite(spec.gamma))
    throw ValidationError("penalty: gamma must be finite");
}

std::string_view family_name(PenaltyFamily family) {
  switch (family) {
    case PenaltyFamily::hard: return "hard";
    case PenaltyFamily::soft: return "soft";
    case PenaltyFamily::scad: return "scad";
    case PenaltyFamily::mcp: return "mcp";
  }
  return "?";
}

PenaltySpec parse_penalty(std::string_view text, double lambda) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  PenaltySpec spec;
  spec.lambda = lambda;
  if (name == "soft" || name == "hard") {
    if (colon != std::string_view::npos)
      throw ConfigurationError("penalty '" + std::string(name) + "' takes no gamma");
    spec.family = name == "soft" ? PenaltyFamily::soft : PenaltyFamily::hard;
  } else if (name == "scad" || name == "mcp") {
    if (colon == std::string_view::npos)
      throw ConfigurationError("penalty '" + std::string(name) + "' needs a gamma, e.g. " +
                               std::string(name) + ":3.7");
    const std::string_view g = text.substr(colon + 1);
    double gamma = 0.0;
    auto [ptr, ec] = std::from_chars(g.data(), g.data() + g.size(), gamma);
    if (ec != std::errc() || ptr != g.data() + g.size())
      throw ConfigurationError("bad gamma in penalty '" + std::string(text) + "'");
    spec.family = name == "scad" ? PenaltyFamily::scad : PenaltyFamily::mcp;
    spec.gamma = gamma;
  } else {
    throw ConfigurationError("unknown penalty '" + std::string(text) +
                             "' (expected soft|hard|scad:GAMMA|mcp:GAMMA)");
  }
  validate(spec);
  return spec;
}

std::string to_string(const PenaltySpec& spec) {
  std::string out(family_name(spec.family));
  if (spec.family == PenaltyFamily::scad || spec.family == PenaltyFamily::mcp) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, spec.gamma);
    out += ':';
    out.append(buf, ptr);
  }
  return out;
}

double penalty_value(const PenaltySpec& spec, double t) {
  const double a = std::abs(t);
  const double l = spec.lambda;
  const double g = spec.gamma;
  switch (spec.family) {
    case PenaltyFamily::soft:
      return l * a;
    case PenaltyFamily::hard: {
      const double gap = std::max(l - a, 0.0);
      return 0.5 * (l * l - gap * gap);
    }
    case PenaltyFamily::scad:
      if (a <= l) return l * a;
      if (a <= g * l) return (2.0 * g * l * a - a * a - l * l) / (2.0 * (g - 1.0));
      return 0.5 * l * l * (g + 1.0);
    case PenaltyFamily::mcp:
      if (a <= g * l) return l * a - a * a / (2.0 * g);
      return 0.5 * g * l * l;
  }
  return 0.0;
}

double penalty_derivative(const PenaltySpec& spec, double t) {
  if (t < 0.0) throw DomainError("penalty_derivative: t must be >= 0");
  const double l = spec.lambda;
  const double g = spec.gamma;
  switch (spec.family) {
    case PenaltyFamily::soft:
      return l;
    case PenaltyFamily::hard:
      return std::max(l - t, 0.0);
    case PenaltyFamily::scad:
      if (t <= l) return l;
      return std::max(g * l - t, 0.0) / (g - 1.0);
    case PenaltyFamily::mcp:
      return std::max(l - t / g, 0.0);
  }
  return 0.0;
}

double prox_objective(const PenaltySpec& spec, double z, double step, double b) {
  return 0.5 * (z - b) * (z - b) + step * penalty_value(spec, b);
}

namespace {

// On a piece [lo, hi] of |b| where P(a) = c0 + c1 a + c2 a^2, the magnitude
// objective 0.5 (u - a)^2 + step P(a) is quadratic; its minimizer over the
// piece is either the stationary point or an endpoint.
struct Piece {
  double lo;
  double hi;
  double c1;
  double c2;
};

}  // namespace

double prox(const PenaltySpec& spec, double z, double step) {
  if (!(step > 0.0)) throw DomainError("prox: step must be > 0");
  const double u = std::abs(z);
  if (u == 0.0) return 0.0;
  const double l = spec.lambda;
  const double g = spec.gamma;
  const double inf = std::numeric_limits<double>::infinity();

  std::array<Piece, 3> pieces{};
  std::size_t count = 0;
  switch (spec.family) {
    case PenaltyFamily::soft:
      pieces[count++] = {0.0, inf, l, 0.0};
      break;
    case PenaltyFamily::hard:
      pieces[count++] = {0.0, l, l, -0.5};
      pieces[count++] = {l, inf, 0.0, 0.0};
      break;
    case PenaltyFamily::scad:
      pieces[count++] = {0.0, l, l, 0.0};
      pieces[count++] = {l, g * l, g * l / (g - 1.0), -0.5 / (g - 1.0)};
      pieces[count++] = {g * l, inf, 0.0, 0.0};
      break;
    case PenaltyFamily::mcp:
      pieces[count++] = {0.0, g * l, l, -0.5 / g};
      pieces[count++] = {g * l, inf, 0.0, 0.0};
      break;
  }

  double best_a = 0.0;
  double best_f = prox_objective(spec, u, step, 0.0);
  auto consider = [&](double a) {
    const double f = prox_objective(spec, u, step, a);
    if (f < best_f || (f == best_f && a > best_a)) {
      best_f = f;
      best_a = a;
    }
  };
  for (std::size_t k = 0; k < count; ++k) {
    const Piece& p = pieces[k];
    consider(p.lo);
    if (std::isfinite(p.hi)) consider(p.hi);
    // d/da: a - u + step (c1 + 2 c2 a) = 0
    const double curvature = 1.0 + 2.0 * step * p.c2;
    if (curvature > 0.0) {
      const double a = (u - step * p.c1) / curvature;
      if (a > p.lo && a < p.hi) consider(a);
    }
  }
  return std::copysign(best_a, z);
}

}  // namespace sparselab
