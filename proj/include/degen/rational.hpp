#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace degen {

/// Exact rational scalar used for all combinatorial face and measure data.
using Rational = boost::multiprecision::mpq_rational;

template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXq = VectorX<Rational>;
using MatrixXq = MatrixX<Rational>;

/// Accepts "p", "p/q" and finite decimals such as "-0.125" or "1e-3".
Rational parse_rational(std::string_view text);

/// Always renders lowest terms; integers are printed without a denominator.
std::string to_string(const Rational& value);

inline double to_double(const Rational& value) { return value.convert_to<double>(); }

std::int64_t gcd_of(std::span<const std::int64_t> values);

template <class Scalar>
VectorX<double> to_double(const VectorX<Scalar>& v) {
  VectorX<double> out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = static_cast<double>(v[i]);
  return out;
}

inline VectorX<double> to_double(const VectorXq& v) {
  VectorX<double> out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = to_double(v[i]);
  return out;
}

inline MatrixX<double> to_double(const MatrixXq& m) {
  MatrixX<double> out(m.rows(), m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out(r, c) = to_double(m(r, c));
  return out;
}

}  // namespace degen
