#include "fent/numeric.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <utility>

#include "fent/errors.hpp"

namespace fent {

namespace {

constexpr std::array<unsigned, 25> kSmallPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                                                   43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto fail = [&] { return InvalidArgument("malformed rational \"" + std::string(text) + "\""); };
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  Rational q;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) throw fail();
    const mpz_class d{std::string(den)};
    if (d == 0) throw InvalidArgument("zero denominator in \"" + std::string(text) + "\"");
    q = Rational(mpz_class(std::string(num)), d);
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    auto whole = body.substr(0, dot);
    auto frac = body.substr(dot + 1);
    if ((!whole.empty() && !all_digits(whole)) || !all_digits(frac)) throw fail();
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    const mpz_class w = whole.empty() ? mpz_class(0) : mpz_class(std::string(whole));
    q = Rational(w * scale + mpz_class(std::string(frac)), scale);
  } else {
    if (!all_digits(body)) throw fail();
    q = Rational(mpz_class(std::string(body)));
  }
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

std::string format_rational(const Rational& q) { return q.get_str(); }

double log_of(const mpz_class& z) {
  long exponent = 0;
  const double mantissa = mpz_get_d_2exp(&exponent, z.get_mpz_t());
  return std::log(mantissa) + static_cast<double>(exponent) * std::log(2.0);
}

void LogCombination::add_log(const mpz_class& base, const Rational& coefficient) {
  if (base <= 0) throw InvalidArgument("log of a non-positive integer");
  if (coefficient == 0 || base == 1) return;
  mpz_class rest = base;
  auto bump = [&](const mpz_class& b, const Rational& c) {
    auto [it, inserted] = coefficients_.try_emplace(b, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) coefficients_.erase(it);
    }
  };
  for (unsigned p : kSmallPrimes) {
    unsigned count = 0;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), p) != 0) {
      mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
      ++count;
    }
    if (count > 0) bump(mpz_class(p), coefficient * count);
    if (rest == 1) return;
  }
  bump(rest, coefficient);
}

void LogCombination::add_plogp(const Rational& p, const Rational& multiplicity) {
  if (p < 0 || p > 1) throw InvalidArgument("probability outside [0, 1]");
  if (p == 0 || p == 1) return;
  const Rational c = p * multiplicity;
  add_log(p.get_num(), -c);
  add_log(p.get_den(), c);
}

LogCombination& LogCombination::operator+=(const LogCombination& other) {
  for (const auto& [b, c] : other.coefficients_) {
    auto [it, inserted] = coefficients_.try_emplace(b, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) coefficients_.erase(it);
    }
  }
  return *this;
}

LogCombination& LogCombination::operator-=(const LogCombination& other) {
  for (const auto& [b, c] : other.coefficients_) {
    auto [it, inserted] = coefficients_.try_emplace(b, -c);
    if (!inserted) {
      it->second -= c;
      if (it->second == 0) coefficients_.erase(it);
    }
  }
  return *this;
}

LogCombination& LogCombination::operator*=(const Rational& factor) {
  if (factor == 0) {
    coefficients_.clear();
    return *this;
  }
  for (auto& [b, c] : coefficients_) c *= factor;
  return *this;
}

bool LogCombination::is_zero() const {
  if (coefficients_.empty()) return true;
  std::vector<std::pair<mpz_class, Rational>> terms(coefficients_.begin(), coefficients_.end());
  // Refine to a pairwise coprime basis: split any two bases sharing a factor g.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < terms.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < terms.size() && !changed; ++j) {
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), terms[i].first.get_mpz_t(), terms[j].first.get_mpz_t());
        if (g == 1) continue;
        auto [bi, ci] = terms[i];
        auto [bj, cj] = terms[j];
        terms.erase(terms.begin() + static_cast<std::ptrdiff_t>(j));
        terms.erase(terms.begin() + static_cast<std::ptrdiff_t>(i));
        std::vector<std::pair<mpz_class, Rational>> pieces{{g, ci + cj}, {bi / g, ci}, {bj / g, cj}};
        for (auto& [b, c] : pieces) {
          if (b == 1 || c == 0) continue;
          auto it = std::find_if(terms.begin(), terms.end(), [&](const auto& t) { return t.first == b; });
          if (it == terms.end()) {
            terms.emplace_back(b, c);
          } else {
            it->second += c;
            if (it->second == 0) terms.erase(it);
          }
        }
        changed = true;
      }
    }
  }
  return std::all_of(terms.begin(), terms.end(), [](const auto& t) { return t.second == 0; });
}

double LogCombination::evaluate() const {
  CompensatedSum sum;
  for (const auto& [b, c] : coefficients_) sum.add(c.get_d() * log_of(b));
  return sum.value();
}

std::string LogCombination::to_string() const {
  if (coefficients_.empty()) return "0";
  std::string s;
  for (const auto& [b, c] : coefficients_) {
    if (!s.empty()) s += c < 0 ? " - " : " + ";
    else if (c < 0) s += "-";
    s += format_rational(abs(c)) + "*log(" + b.get_str() + ")";
  }
  return s;
}

Nats Nats::shannon_exact(const std::vector<Rational>& weights) {
  LogCombination c;
  for (const auto& w : weights) c.add_plogp(w);
  return exactly(std::move(c));
}

Nats& Nats::operator+=(const Nats& o) {
  if (exact_ && o.exact_) {
    *exact_ += *o.exact_;
    value_ = exact_->evaluate();
  } else {
    exact_.reset();
    value_ += o.value_;
  }
  return *this;
}

Nats& Nats::operator-=(const Nats& o) {
  if (exact_ && o.exact_) {
    *exact_ -= *o.exact_;
    value_ = exact_->evaluate();
  } else {
    exact_.reset();
    value_ -= o.value_;
  }
  return *this;
}

Nats& Nats::operator*=(const Rational& f) {
  if (exact_) {
    *exact_ *= f;
    value_ = exact_->evaluate();
  } else {
    value_ *= f.get_d();
  }
  return *this;
}

bool exactly_equal(const Nats& a, const Nats& b) {
  if (!a.is_exact() || !b.is_exact()) return false;
  LogCombination d = *a.exact();
  d -= *b.exact();
  return d.is_zero();
}

bool agree(const Nats& a, const Nats& b, double tol) {
  if (a.is_exact() && b.is_exact()) return exactly_equal(a, b);
  return std::abs(a.value() - b.value()) <= tol;
}

}  // namespace fent
