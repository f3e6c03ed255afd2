#pragma once

// Rationals, compensated summation, and exact entropy values.

#include <gmpxx.h>

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fent {

using Rational = mpq_class;

// "p/q", an integer, or a finite decimal such as "0.125" (parsed exactly).
Rational parse_rational(std::string_view text);
std::string format_rational(const Rational& q);

// Neumaier's variant of Kahan summation. The error bound does not grow with the
// number of terms; the result depends only on the order of add() calls.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  void add(const CompensatedSum& other) {
    add(other.sum_);
    add(other.carry_);
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// An exact real of the form sum_i c_i * log(b_i) with rational c_i and integer
// b_i > 1. Small prime factors are split off eagerly; zero testing reduces the
// remaining bases to a pairwise coprime set, over which the logs are linearly
// independent.
class LogCombination {
 public:
  LogCombination() = default;

  // Adds -p log p (p in [0, 1]; p = 0 contributes nothing).
  void add_plogp(const Rational& p, const Rational& multiplicity = 1);
  void add_log(const mpz_class& base, const Rational& coefficient);

  LogCombination& operator+=(const LogCombination& other);
  LogCombination& operator-=(const LogCombination& other);
  LogCombination& operator*=(const Rational& factor);

  bool is_zero() const;
  double evaluate() const;
  std::size_t terms() const { return coefficients_.size(); }
  // e.g. "3/2*log(2) - 1*log(3)"
  std::string to_string() const;

 private:
  std::map<mpz_class, Rational> coefficients_;
};

// An entropy-like quantity in nats: a float value, plus its exact form when
// every input was exact.
class Nats {
 public:
  Nats() : value_(0.0), exact_(LogCombination()) {}
  static Nats approximate(double v) { return Nats(v, std::nullopt); }
  static Nats exactly(LogCombination c) {
    const double v = c.evaluate();
    return Nats(v, std::move(c));
  }
  // -p log p for a distribution, exact.
  static Nats shannon_exact(const std::vector<Rational>& weights);

  double value() const { return value_; }
  bool is_exact() const { return exact_.has_value(); }
  const std::optional<LogCombination>& exact() const { return exact_; }
  Nats dropped_exactness() const { return approximate(value_); }

  Nats& operator+=(const Nats& o);
  Nats& operator-=(const Nats& o);
  Nats& operator*=(const Rational& f);
  friend Nats operator+(Nats a, const Nats& b) { return a += b; }
  friend Nats operator-(Nats a, const Nats& b) { return a -= b; }
  friend Nats operator*(Nats a, const Rational& f) { return a *= f; }
  friend Nats operator*(const Rational& f, Nats a) { return a *= f; }

 private:
  Nats(double v, std::optional<LogCombination> c) : value_(v), exact_(std::move(c)) {}

  double value_;
  std::optional<LogCombination> exact_;
};

// Both sides exact and their difference is exactly zero.
bool exactly_equal(const Nats& a, const Nats& b);
// Exact comparison when both are exact, else |a - b| <= tol.
bool agree(const Nats& a, const Nats& b, double tol);

double log_of(const mpz_class& z);

}  // namespace fent
