#include "arakelab/poly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include <nlohmann/json.hpp>

#include "arakelab/errors.hpp"

namespace arakelab {

ExponentIndex::ExponentIndex(std::vector<int> a) : a_(std::move(a)) {
  for (int e : a_) {
    if (e < 0) throw InvalidArgument("negative exponent in ExponentIndex");
    total_ += e;
  }
}

ExponentIndex operator+(const ExponentIndex& x, const ExponentIndex& y) {
  if (x.size() != y.size()) throw InvalidArgument("exponent length mismatch");
  std::vector<int> s(x.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = x[i] + y[i];
  return ExponentIndex(std::move(s));
}

bool GradedLexBefore::operator()(const ExponentIndex& x, const ExponentIndex& y) const {
  if (x.total() != y.total()) return x.total() < y.total();
  return std::lexicographical_compare(y.exponents().begin(), y.exponents().end(),
                                      x.exponents().begin(), x.exponents().end());
}

std::vector<ExponentIndex> enumerate_exponents(int N, int k) {
  if (N < 0 || k < 0) throw InvalidArgument("enumerate_exponents: N and k must be >= 0");
  std::vector<ExponentIndex> out;
  out.reserve(monomial_count(N, k));
  std::vector<int> a(static_cast<std::size_t>(N) + 1, 0);
  // Odometer over compositions of k, lexicographically descending.
  a[0] = k;
  while (true) {
    out.emplace_back(a);
    // Find the rightmost position i < N with a[i] > 0; move one unit right and
    // sweep everything after it into position i+1.
    int i = N - 1;
    while (i >= 0 && a[static_cast<std::size_t>(i)] == 0) --i;
    if (i < 0) break;
    const auto ui = static_cast<std::size_t>(i);
    int tail = 0;
    for (std::size_t j = ui + 1; j < a.size(); ++j) {
      tail += a[j];
      a[j] = 0;
    }
    --a[ui];
    a[ui + 1] = tail + 1;
  }
  return out;
}

std::size_t graded_lex_rank(const ExponentIndex& a) {
  const int N = static_cast<int>(a.size()) - 1;
  std::size_t rank = 0;
  int rem = a.total();
  for (int i = 0; i < N; ++i) {
    const int vars_after = N - i;  // variables strictly after position i
    for (int v = rem; v > a[static_cast<std::size_t>(i)]; --v) {
      rank += monomial_count(vars_after - 1, rem - v);
    }
    rem -= a[static_cast<std::size_t>(i)];
  }
  return rank;
}

Integer binomial(long n, long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

std::size_t monomial_count(int N, int k) {
  if (k < 0) return 0;
  return binomial(k + N, N).get_ui();
}

HomogeneousPolynomial::HomogeneousPolynomial(int nvars, int degree, Terms terms)
    : nvars_(nvars), degree_(degree), terms_(std::move(terms)) {}

HomogeneousPolynomial::HomogeneousPolynomial(
    int nvars, const std::vector<std::pair<std::vector<int>, Integer>>& terms)
    : nvars_(nvars) {
  if (nvars < 1) throw InvalidArgument("polynomial needs at least one variable");
  for (const auto& [exp, coef] : terms) {
    if (static_cast<int>(exp.size()) != nvars) {
      throw InvalidArgument("exponent vector length " + std::to_string(exp.size()) +
                            " != nvars " + std::to_string(nvars));
    }
    terms_[ExponentIndex(exp)] += coef;
  }
  std::erase_if(terms_, [](const auto& t) { return t.second == 0; });
  if (terms_.empty()) throw InvalidArgument("zero polynomial");
  degree_ = terms_.begin()->first.total();
  for (const auto& [m, c] : terms_) {
    if (m.total() != degree_) throw InvalidArgument("polynomial is not homogeneous");
  }
}

HomogeneousPolynomial HomogeneousPolynomial::monomial(const ExponentIndex& a, Integer coef) {
  return HomogeneousPolynomial(static_cast<int>(a.size()), {{a.exponents(), std::move(coef)}});
}

Integer HomogeneousPolynomial::coefficient(const ExponentIndex& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Integer(0) : it->second;
}

HomogeneousPolynomial poly_mul(const HomogeneousPolynomial& f, const HomogeneousPolynomial& g) {
  if (f.nvars() != g.nvars()) {
    throw InvalidArgument("poly_mul: mismatched nvars " + std::to_string(f.nvars()) + " and " +
                          std::to_string(g.nvars()));
  }
  HomogeneousPolynomial::Terms out;
  for (const auto& [a, ca] : f.terms())
    for (const auto& [b, cb] : g.terms()) out[a + b] += ca * cb;
  // Products of nonzero integer polynomials are nonzero, but individual
  // coefficients may cancel.
  std::erase_if(out, [](const auto& t) { return t.second == 0; });
  return HomogeneousPolynomial(f.nvars(), f.degree() + g.degree(), std::move(out));
}

HomogeneousPolynomial scale(const HomogeneousPolynomial& f, const Integer& lambda) {
  if (lambda == 0) throw InvalidArgument("scale: zero factor");
  std::vector<std::pair<std::vector<int>, Integer>> terms;
  for (const auto& [m, c] : f.terms()) terms.emplace_back(m.exponents(), c * lambda);
  return HomogeneousPolynomial(f.nvars(), terms);
}

DehomogenizedPolynomial dehomogenize(const HomogeneousPolynomial& f) {
  DehomogenizedPolynomial g;
  g.nvars = f.N();
  g.degree = f.degree();
  for (const auto& [m, c] : f.terms()) {
    std::vector<int> alpha(m.exponents().begin() + 1, m.exponents().end());
    g.coeffs.emplace(std::move(alpha), c);
  }
  return g;
}

HomogeneousPolynomial rehomogenize(const DehomogenizedPolynomial& g, int d) {
  std::vector<std::pair<std::vector<int>, Integer>> terms;
  for (const auto& [alpha, c] : g.coeffs) {
    int s = 0;
    for (int e : alpha) s += e;
    if (s > d) throw InvalidArgument("rehomogenize: target degree below affine degree");
    std::vector<int> a;
    a.reserve(alpha.size() + 1);
    a.push_back(d - s);
    a.insert(a.end(), alpha.begin(), alpha.end());
    terms.emplace_back(std::move(a), c);
  }
  return HomogeneousPolynomial(g.nvars + 1, terms);
}

namespace {

struct ParsedTerm {
  Integer coef;
  std::map<int, int> powers;  // variable index -> exponent
  std::string text;
};

class PolyParser {
 public:
  explicit PolyParser(std::string_view s) : s_(s) {}

  std::vector<ParsedTerm> parse() {
    std::vector<ParsedTerm> terms;
    skip_ws();
    if (at_end()) fail("empty polynomial");
    bool first = true;
    while (!at_end()) {
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = get() == '-' ? -1 : 1;
        skip_ws();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      first = false;
      const std::size_t start = pos_;
      ParsedTerm t = term();
      t.coef *= sign;
      t.text = std::string(s_.substr(start, pos_ - start));
      while (!t.text.empty() && std::isspace(static_cast<unsigned char>(t.text.back()))) {
        t.text.pop_back();
      }
      if (sign < 0) t.text = "-" + t.text;
      terms.push_back(std::move(t));
      skip_ws();
    }
    return terms;
  }

 private:
  ParsedTerm term() {
    ParsedTerm t;
    t.coef = 1;
    factor(t);
    skip_ws();
    while (!at_end() && peek() == '*') {
      get();
      skip_ws();
      factor(t);
      skip_ws();
    }
    return t;
  }

  void factor(ParsedTerm& t) {
    if (at_end()) fail("unexpected end of input");
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      t.coef *= Integer(digits());
      return;
    }
    if (peek() == 'x' || peek() == 'X') {
      get();
      if (at_end() || !std::isdigit(static_cast<unsigned char>(peek()))) {
        fail("expected variable index after 'x'");
      }
      const int var = small_int(digits());
      int e = 1;
      skip_ws();
      if (!at_end() && peek() == '^') {
        get();
        skip_ws();
        if (at_end() || !std::isdigit(static_cast<unsigned char>(peek()))) {
          fail("expected exponent after '^'");
        }
        e = small_int(digits());
      }
      t.powers[var] += e;
      return;
    }
    fail(std::string("unexpected character '") + peek() + "'");
  }

  std::string digits() {
    const std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  int small_int(const std::string& d) const {
    if (d.size() > 6) fail("index or exponent too large: " + d);
    return std::stoi(d);
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  char get() { return s_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("syntax error at position " + std::to_string(pos_) + ": " + msg);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

HomogeneousPolynomial assemble(const std::vector<ParsedTerm>& parsed, int N) {
  for (const auto& t : parsed) {
    for (const auto& [var, e] : t.powers) {
      if (var > N) {
        throw ParseError("variable x" + std::to_string(var) + " out of range for N = " +
                         std::to_string(N) + " (allowed x0..x" + std::to_string(N) + ")");
      }
    }
  }
  auto degree_of = [](const ParsedTerm& t) {
    int d = 0;
    for (const auto& [var, e] : t.powers) d += e;
    return d;
  };
  const int d0 = degree_of(parsed.front());
  std::vector<std::string> offending;
  for (const auto& t : parsed) {
    if (degree_of(t) != d0) offending.push_back(t.text + " (degree " + std::to_string(degree_of(t)) + ")");
  }
  if (!offending.empty()) {
    std::ostringstream msg;
    msg << "polynomial is not homogeneous: leading degree " << d0 << ", offending monomials: ";
    for (std::size_t i = 0; i < offending.size(); ++i) msg << (i ? ", " : "") << offending[i];
    throw ParseError(msg.str());
  }
  std::vector<std::pair<std::vector<int>, Integer>> terms;
  for (const auto& t : parsed) {
    std::vector<int> a(static_cast<std::size_t>(N) + 1, 0);
    for (const auto& [var, e] : t.powers) a[static_cast<std::size_t>(var)] += e;
    terms.emplace_back(std::move(a), t.coef);
  }
  try {
    return HomogeneousPolynomial(N + 1, terms);
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
}

}  // namespace

HomogeneousPolynomial parse_poly(std::string_view text, int N) {
  if (N < 0) throw InvalidArgument("parse_poly: N must be >= 0");
  return assemble(PolyParser(text).parse(), N);
}

HomogeneousPolynomial parse_poly(std::string_view text) {
  const auto parsed = PolyParser(text).parse();
  int N = 0;
  for (const auto& t : parsed)
    for (const auto& [var, e] : t.powers) N = std::max(N, var);
  return assemble(parsed, N);
}

std::string to_string(const HomogeneousPolynomial& f) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : f.terms()) {
    Integer mag = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    bool wrote = false;
    if (mag != 1 || m.total() == 0) {
      os << mag.get_str();
      wrote = true;
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      if (wrote) os << "*";
      os << "x" << i;
      if (m[i] > 1) os << "^" << m[i];
      wrote = true;
    }
  }
  return os.str();
}

std::string poly_to_json(const HomogeneousPolynomial& f) {
  nlohmann::json j;
  j["nvars"] = f.nvars();
  j["terms"] = nlohmann::json::array();
  for (const auto& [m, c] : f.terms()) {
    j["terms"].push_back({{"exp", m.exponents()}, {"coef", c.get_str()}});
  }
  return j.dump();
}

HomogeneousPolynomial poly_from_json(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid polynomial JSON: ") + e.what());
  }
  try {
    const int nvars = j.at("nvars").get<int>();
    std::vector<std::pair<std::vector<int>, Integer>> terms;
    for (const auto& t : j.at("terms")) {
      const auto& coef = t.at("coef");
      Integer c;
      if (coef.is_string()) {
        if (c.set_str(coef.get<std::string>(), 10) != 0) {
          throw ParseError("coefficient is not a decimal integer: " + coef.get<std::string>());
        }
      } else {
        c = Integer(std::to_string(coef.get<long long>()));
      }
      terms.emplace_back(t.at("exp").get<std::vector<int>>(), c);
    }
    return HomogeneousPolynomial(nvars, terms);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed polynomial JSON: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
}

}  // namespace arakelab
