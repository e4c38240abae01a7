#include "opid/matfun.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include "opid/errors.hpp"

namespace opid {

namespace {

constexpr std::pair<Family, std::string_view> kFamilyNames[] = {
    {Family::zero, "zero"},           {Family::constant, "constant"},
    {Family::linear, "linear"},       {Family::trig, "trig"},
    {Family::polynomial, "polynomial"}, {Family::fourier_random, "fourier_random"},
};

// 53 random bits -> [0, 1); fixed construction so seeds reproduce across
// standard library implementations.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidSpec(msg);
}

}  // namespace

std::string_view to_string(Family f) {
  for (auto [fam, name] : kFamilyNames)
    if (fam == f) return name;
  return "unknown";
}

Family family_from_string(std::string_view name) {
  for (auto [fam, n] : kFamilyNames)
    if (n == name) return fam;
  throw InvalidSpec("unknown matrix function family '" + std::string(name) + "'");
}

MatrixFunction::MatrixFunction(MatrixFunctionSpec spec) : spec_(std::move(spec)) {
  require(spec_.m1 > 0 && spec_.m2 > 0, "matrix function dimensions must be positive");
  require(spec_.length > 0 && std::isfinite(spec_.length), "domain length must be positive");
  if (spec_.offset) {
    require(spec_.offset->rows() == spec_.m2 && spec_.offset->cols() == spec_.m1, "offset must be m2 x m1");
    require(spec_.offset->allFinite(), "offset entries must be finite");
  }
  for (const auto& c : spec_.coefficients) {
    std::ostringstream os;
    os << "coefficient has shape " << c.rows() << "x" << c.cols() << ", expected " << spec_.m2
       << "x" << spec_.m1;
    require(c.rows() == spec_.m2 && c.cols() == spec_.m1, os.str());
    require(c.allFinite(), "coefficient entries must be finite");
  }
  const auto ncoef = spec_.coefficients.size();
  switch (spec_.family) {
    case Family::zero:
      require(ncoef == 0, "zero family takes no coefficients");
      break;
    case Family::constant:
    case Family::linear:
      require(ncoef == 1, std::string(to_string(spec_.family)) + " family needs exactly one coefficient");
      break;
    case Family::trig:
      require(ncoef == 1, "trig family needs exactly one coefficient");
      require(std::isfinite(spec_.omega), "trig family needs a finite omega");
      break;
    case Family::polynomial:
      require(ncoef >= 1, "polynomial family needs at least one coefficient");
      break;
    case Family::fourier_random: {
      require(ncoef == 0, "fourier_random takes no coefficients");
      require(spec_.num_terms > 0, "fourier_random needs num_terms > 0");
      require(spec_.decay > 0 && std::isfinite(spec_.decay), "fourier_random needs decay > 0");
      std::mt19937_64 rng(spec_.seed);
      modes_.reserve(spec_.num_terms);
      for (int k = 1; k <= spec_.num_terms; ++k) {
        MatrixXcd a(spec_.m2, spec_.m1);
        for (Index c = 0; c < a.cols(); ++c)
          for (Index r = 0; r < a.rows(); ++r) {
            // uniform in the unit disc
            const double radius = std::sqrt(unit_uniform(rng));
            const double angle = 2 * std::numbers::pi * unit_uniform(rng);
            a(r, c) = std::polar(radius, angle);
          }
        modes_.push_back(a / std::pow(static_cast<double>(k), spec_.decay));
      }
      break;
    }
  }
  for (const auto& a : spec_.addends) {
    require(a.m1 == spec_.m1 && a.m2 == spec_.m2, "addend shape differs from the parent spec");
    require(a.length == spec_.length, "addend domain differs from the parent spec");
    addends_.emplace_back(a);
  }
  origin_ = value_unchecked(0.0);
}

void MatrixFunction::check_domain(double x) const {
  const double slack = 1e-12 * std::max(1.0, spec_.length);
  if (!(x >= -slack && x <= spec_.length + slack)) {
    std::ostringstream os;
    os << "x = " << x << " outside [0, " << spec_.length << "]";
    throw DomainError(os.str());
  }
}

MatrixXcd MatrixFunction::value_unchecked(double x) const {
  MatrixXcd v = family_value(x);
  if (spec_.offset) v += *spec_.offset;
  for (const auto& a : addends_) v += a.value_unchecked(x);
  return v;
}

MatrixXcd MatrixFunction::family_value(double x) const {
  const auto& c = spec_.coefficients;
  switch (spec_.family) {
    case Family::zero:
      return MatrixXcd::Zero(spec_.m2, spec_.m1);
    case Family::constant:
      return c[0];
    case Family::linear:
      return c[0] * x;
    case Family::trig:
      return c[0] * std::sin(spec_.omega * x);
    case Family::polynomial: {
      MatrixXcd acc = c.back();
      for (auto it = c.rbegin() + 1; it != c.rend(); ++it) acc = acc * x + *it;
      return acc;
    }
    case Family::fourier_random: {
      MatrixXcd acc = MatrixXcd::Zero(spec_.m2, spec_.m1);
      const double base = std::numbers::pi * x / spec_.length;
      for (std::size_t k = 0; k < modes_.size(); ++k)
        acc += modes_[k] * std::sin(static_cast<double>(k + 1) * base);
      return acc;
    }
  }
  return {};
}

MatrixXcd MatrixFunction::deriv_unchecked(double x) const {
  MatrixXcd d = family_deriv(x);
  for (const auto& a : addends_) d += a.deriv_unchecked(x);
  return d;
}

MatrixXcd MatrixFunction::family_deriv(double x) const {
  const auto& c = spec_.coefficients;
  switch (spec_.family) {
    case Family::zero:
    case Family::constant:
      return MatrixXcd::Zero(spec_.m2, spec_.m1);
    case Family::linear:
      return c[0];
    case Family::trig:
      return c[0] * (spec_.omega * std::cos(spec_.omega * x));
    case Family::polynomial: {
      if (c.size() == 1) return MatrixXcd::Zero(spec_.m2, spec_.m1);
      const auto k = c.size() - 1;
      MatrixXcd acc = c[k] * static_cast<double>(k);
      for (auto j = k - 1; j >= 1; --j) acc = acc * x + c[j] * static_cast<double>(j);
      return acc;
    }
    case Family::fourier_random: {
      MatrixXcd acc = MatrixXcd::Zero(spec_.m2, spec_.m1);
      const double freq = std::numbers::pi / spec_.length;
      for (std::size_t k = 0; k < modes_.size(); ++k) {
        const double kf = static_cast<double>(k + 1) * freq;
        acc += modes_[k] * (kf * std::cos(kf * x));
      }
      return acc;
    }
  }
  return {};
}

MatrixXcd MatrixFunction::eval(double x) const {
  check_domain(x);
  return value_unchecked(x);
}

MatrixXcd MatrixFunction::eval_deriv(double x) const {
  check_domain(x);
  return deriv_unchecked(x);
}

MatrixPath MatrixFunction::as_path() const {
  auto self = std::make_shared<const MatrixFunction>(*this);
  return MatrixPath{spec_.m2, spec_.m1, [self](double x) { return self->eval(x); },
                    [self](double x) { return self->eval_deriv(x); }};
}

MatrixFunction make_family(const MatrixFunctionSpec& spec) { return MatrixFunction(spec); }

MatrixXcd eval_phi(const MatrixFunction& fn, double x) { return fn.eval(x); }

MatrixXcd eval_phi_deriv(const MatrixFunction& fn, double x) { return fn.eval_deriv(x); }

MatrixFunctionSpec scalar_spec(Family family, std::vector<double> coefficients, double length) {
  MatrixFunctionSpec spec;
  spec.family = family;
  spec.length = length;
  for (double c : coefficients) spec.coefficients.push_back(MatrixXcd::Constant(1, 1, c));
  return spec;
}

}  // namespace opid
