#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "roughpath/contract.hpp"

namespace roughpath {

// Word over the alphabet {1..d}, printed as ASCII over "abcd..." (1 -> 'a').
// Comparison is alphabetical with 1 < 2 < ... < d, a prefix sorting before
// its extensions.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<int> letters) : letters_(std::move(letters)) {
    for (int l : letters_) require(l >= 1, "Word: letters must be >= 1");
  }

  static Word from_string(const std::string& s) {
    std::vector<int> letters;
    letters.reserve(s.size());
    for (char c : s) {
      require(c >= 'a' && c <= 'z', "Word: expected letters a..z");
      letters.push_back(c - 'a' + 1);
    }
    return Word(std::move(letters));
  }

  std::string to_string() const {
    if (letters_.empty()) return "e";
    std::string s;
    for (int l : letters_) s += static_cast<char>('a' + l - 1);
    return s;
  }

  const std::vector<int>& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  int letter(std::size_t i) const { return letters_[i]; }

  Word append(int letter) const {
    std::vector<int> l = letters_;
    l.push_back(letter);
    return Word(std::move(l));
  }

  Word prefix(std::size_t n) const {
    return Word(std::vector<int>(letters_.begin(), letters_.begin() + static_cast<std::ptrdiff_t>(n)));
  }

  Word suffix_from(std::size_t n) const {
    return Word(std::vector<int>(letters_.begin() + static_cast<std::ptrdiff_t>(n), letters_.end()));
  }

  Word concat(const Word& other) const {
    std::vector<int> l = letters_;
    l.insert(l.end(), other.letters_.begin(), other.letters_.end());
    return Word(std::move(l));
  }

  std::map<int, int> letter_counts() const {
    std::map<int, int> m;
    for (int l : letters_) ++m[l];
    return m;
  }

  friend bool operator==(const Word& a, const Word& b) { return a.letters_ == b.letters_; }
  friend bool operator!=(const Word& a, const Word& b) { return !(a == b); }
  friend bool operator<(const Word& a, const Word& b) { return a.letters_ < b.letters_; }
  friend bool operator>(const Word& a, const Word& b) { return b < a; }
  friend bool operator<=(const Word& a, const Word& b) { return !(b < a); }
  friend bool operator>=(const Word& a, const Word& b) { return !(a < b); }

 private:
  std::vector<int> letters_;
};

// Finitely supported integer combination of words. Shuffle products and
// Lyndon expansions have integer coefficients, so this module stays in exact
// arithmetic; zero coefficients are erased on normalization.
class WordPolynomial {
 public:
  using Coeff = long long;
  using Map = std::map<Word, Coeff>;

  WordPolynomial() = default;
  explicit WordPolynomial(const Word& w, Coeff c = 1) { if (c != 0) terms_[w] = c; }

  const Map& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  Coeff coefficient(const Word& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? 0 : it->second;
  }

  int degree() const {
    int d = 0;
    for (const auto& [w, c] : terms_) d = std::max(d, static_cast<int>(w.size()));
    return d;
  }

  Coeff total_mass() const {
    Coeff s = 0;
    for (const auto& [w, c] : terms_) s += c;
    return s;
  }

  void add(const Word& w, Coeff c) {
    auto it = terms_.find(w);
    if (it == terms_.end()) {
      if (c != 0) terms_[w] = c;
    } else {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  WordPolynomial& operator+=(const WordPolynomial& other) {
    for (const auto& [w, c] : other.terms_) add(w, c);
    return *this;
  }

  WordPolynomial& operator-=(const WordPolynomial& other) {
    for (const auto& [w, c] : other.terms_) add(w, -c);
    return *this;
  }

  friend WordPolynomial operator+(WordPolynomial a, const WordPolynomial& b) { return a += b; }
  friend WordPolynomial operator-(WordPolynomial a, const WordPolynomial& b) { return a -= b; }

  friend bool operator==(const WordPolynomial& a, const WordPolynomial& b) {
    return a.terms_ == b.terms_;
  }

  // Canonical form "c1*w1 + c2*w2 - ..." in alphabetical word order.
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [w, c] : terms_) {
      Coeff a = c;
      if (first) {
        if (a < 0) { s += "-"; a = -a; }
      } else {
        s += (a < 0) ? " - " : " + ";
        if (a < 0) a = -a;
      }
      s += std::to_string(a) + "*" + w.to_string();
      first = false;
    }
    return s;
  }

 private:
  Map terms_;
};

namespace detail {

inline WordPolynomial append_all(const WordPolynomial& p, int letter) {
  WordPolynomial out;
  for (const auto& [w, c] : p.terms()) out.add(w.append(letter), c);
  return out;
}

using ShuffleMemo = std::map<std::pair<Word, Word>, WordPolynomial>;

inline const WordPolynomial& shuffle_impl(const Word& u, const Word& v, ShuffleMemo& memo) {
  auto key = std::make_pair(u, v);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  WordPolynomial result;
  if (u.empty()) {
    result = WordPolynomial(v);
  } else if (v.empty()) {
    result = WordPolynomial(u);
  } else {
    // (ua) sh (vb) = (u sh vb)a + (ua sh v)b
    const int a = u.letter(u.size() - 1);
    const int b = v.letter(v.size() - 1);
    const Word u0 = u.prefix(u.size() - 1);
    const Word v0 = v.prefix(v.size() - 1);
    result = append_all(shuffle_impl(u0, v, memo), a);
    result += append_all(shuffle_impl(u, v0, memo), b);
  }
  return memo.emplace(std::move(key), std::move(result)).first->second;
}

}  // namespace detail

// Shuffle product: the coefficient of w counts subsequence positions U with
// w(U) = u and w(U^c) = v. Exact integer coefficients; the memo is per call,
// so concurrent calls never share state.
inline WordPolynomial shuffle(const Word& u, const Word& v) {
  detail::ShuffleMemo memo;
  return detail::shuffle_impl(u, v, memo);
}

inline WordPolynomial shuffle(const WordPolynomial& p, const WordPolynomial& q) {
  detail::ShuffleMemo memo;
  WordPolynomial out;
  for (const auto& [u, cu] : p.terms())
    for (const auto& [v, cv] : q.terms()) {
      const WordPolynomial& s = detail::shuffle_impl(u, v, memo);
      for (const auto& [w, c] : s.terms()) out.add(w, c * cu * cv);
    }
  return out;
}

// Lyndon word test straight from the definition: every proper split w = uv
// with u, v non-empty satisfies u < v.
inline bool is_lyndon(const Word& w) {
  require(!w.empty(), "is_lyndon: word must be non-empty");
  for (std::size_t k = 1; k < w.size(); ++k)
    if (!(w.prefix(k) < w.suffix_from(k))) return false;
  return true;
}

// Duval's factorization: w = l_1^{i_1} ... l_k^{i_k} with l_1 > ... > l_k
// Lyndon, unique. Returned as (factor, multiplicity) pairs in that order.
inline std::vector<std::pair<Word, int>> lyndon_factorization(const Word& w) {
  require(!w.empty(), "lyndon_factorization: word must be non-empty");
  const auto& s = w.letters();
  const std::size_t n = s.size();
  std::vector<Word> factors;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1, k = i;
    while (j < n && s[k] <= s[j]) {
      if (s[k] < s[j]) k = i; else ++k;
      ++j;
    }
    const std::size_t len = j - k;
    while (i <= k) {
      factors.emplace_back(std::vector<int>(s.begin() + static_cast<std::ptrdiff_t>(i),
                                            s.begin() + static_cast<std::ptrdiff_t>(i + len)));
      i += len;
    }
  }
  std::vector<std::pair<Word, int>> grouped;
  for (const auto& f : factors) {
    if (!grouped.empty() && grouped.back().first == f)
      ++grouped.back().second;
    else
      grouped.emplace_back(f, 1);
  }
  return grouped;
}

// All Lyndon words whose letter multiset matches `counts` (letter -> count).
// Generation uses Duval's algorithm over the letters present, then filters by
// multiset.
inline std::set<Word> lyndon_words_for_multiset(const std::map<int, int>& counts) {
  int total = 0;
  std::vector<int> alphabet;
  for (const auto& [letter, c] : counts) {
    require(letter >= 1 && c >= 0, "lyndon_words_for_multiset: bad multiset");
    total += c;
    if (c > 0) alphabet.push_back(letter);
  }
  require(total >= 1, "lyndon_words_for_multiset: total count must be >= 1");

  std::set<Word> out;
  const int n = total;
  const int m = static_cast<int>(alphabet.size());
  // Duval's generation of Lyndon words of length <= n over `alphabet`,
  // in increasing alphabetical order.
  std::vector<int> t{0};  // positions into `alphabet`
  while (!t.empty()) {
    if (static_cast<int>(t.size()) == n) {
      std::vector<int> letters(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) letters[i] = alphabet[static_cast<std::size_t>(t[i])];
      Word w{std::move(letters)};
      if (w.letter_counts() == counts) out.insert(w);
    }
    const std::size_t len = t.size();
    while (static_cast<int>(t.size()) < n) t.push_back(t[t.size() - len]);
    while (!t.empty() && t.back() == m - 1) t.pop_back();
    if (!t.empty()) ++t.back();
  }
  return out;
}

// Integer shuffle power w^{*k}.
inline WordPolynomial shuffle_power(const Word& w, int k) {
  WordPolynomial out(Word{});
  WordPolynomial base(w);
  for (int i = 0; i < k; ++i) out = shuffle(out, base);
  return out;
}

struct LyndonShuffleExpansion {
  Word leading;               // w itself, coefficient 1
  WordPolynomial correction;  // sum over u < w (same multiset) of alpha_u * u
};

// Triangular expansion from the decreasing Lyndon factorization
// w = l_1^{i_1}...l_k^{i_k}:
//   (1 / (i_1! ... i_k!)) l_1^{*i_1} * ... * l_k^{*i_k} = w + sum_{u<w} alpha_u u
// with nonnegative integer alpha_u. The shuffle product is evaluated exactly
// in integers and divided by the factorials at the end (the division is
// checked to be exact), and the triangularity properties are enforced.
inline LyndonShuffleExpansion lyndon_shuffle_expansion(const Word& w) {
  require(!w.empty(), "lyndon_shuffle_expansion: word must be non-empty");
  const auto factors = lyndon_factorization(w);
  WordPolynomial product(Word{});
  long long factorial_product = 1;
  for (const auto& [l, mult] : factors) {
    product = shuffle(product, shuffle_power(l, mult));
    for (int i = 2; i <= mult; ++i) factorial_product *= i;
  }
  WordPolynomial normalized;
  for (const auto& [u, c] : product.terms()) {
    require(c % factorial_product == 0,
            "lyndon_shuffle_expansion: coefficient not divisible by factorial normalizer");
    normalized.add(u, c / factorial_product);
  }
  require(normalized.coefficient(w) == 1, "lyndon_shuffle_expansion: leading coefficient != 1");
  LyndonShuffleExpansion out;
  out.leading = w;
  normalized.add(w, -1);
  const auto wc = w.letter_counts();
  for (const auto& [u, c] : normalized.terms()) {
    require(u < w, "lyndon_shuffle_expansion: correction word not smaller than w");
    require(c > 0, "lyndon_shuffle_expansion: correction coefficient not positive");
    require(u.letter_counts() == wc, "lyndon_shuffle_expansion: letter multiset mismatch");
  }
  out.correction = normalized;
  return out;
}

// Generating set for the words composed by a given letter multiset: the
// Lyndon words of that multiset (repeated triangular expansion shows they
// generate modulo shuffle products of shorter words).
inline std::set<Word> generating_set(const std::map<int, int>& counts) {
  return lyndon_words_for_multiset(counts);
}

// Alternative generating set for the words composed by {a,a,b,c}: obtained
// from the Lyndon set {aabc, abac, aacb} by trading abac for baac via the
// shuffle identity relating abac, baac and b * aac.
inline std::set<Word> alternative_generating_set_aabc() {
  return {Word::from_string("aabc"), Word::from_string("aacb"), Word::from_string("baac")};
}

}  // namespace roughpath
