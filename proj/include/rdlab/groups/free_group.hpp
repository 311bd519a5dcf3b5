#pragma once

#include "rdlab/core.hpp"

#include <compare>
#include <cstdlib>
#include <string>
#include <vector>

namespace rdlab {

/// Freely reduced word. Letter +i is generator a_i, -i its inverse (i >= 1).
struct FreeWord {
  std::vector<int> letters;

  auto operator<=>(const FreeWord&) const = default;
  bool operator==(const FreeWord&) const = default;
};

inline std::size_t hash_value(const FreeWord& w) {
  std::size_t h = 0xf4ee;
  for (int l : w.letters) h = hash_combine(h, static_cast<std::size_t>(l));
  return h;
}

/// Free group of finite rank with the word length.
class FreeGroup {
 public:
  using element_type = FreeWord;

  explicit FreeGroup(int rank) : rank_(rank) {
    if (rank < 1) throw PreconditionFailed("free group rank must be >= 1");
  }

  int rank() const noexcept { return rank_; }

  FreeWord identity() const { return {}; }

  FreeWord generator(int i, int exponent = 1) const {
    if (i < 1 || i > rank_) throw PreconditionFailed("generator index out of range");
    FreeWord w;
    w.letters.assign(static_cast<std::size_t>(std::abs(exponent)), exponent < 0 ? -i : i);
    return w;
  }

  FreeWord multiply(const FreeWord& a, const FreeWord& b) const {
    FreeWord out = a;
    std::size_t cancel = 0;
    while (cancel < b.letters.size() && !out.letters.empty() && out.letters.back() == -b.letters[cancel]) {
      out.letters.pop_back();
      ++cancel;
    }
    out.letters.insert(out.letters.end(), b.letters.begin() + static_cast<std::ptrdiff_t>(cancel), b.letters.end());
    return out;
  }

  FreeWord inverse(const FreeWord& a) const {
    FreeWord out;
    out.letters.reserve(a.letters.size());
    for (auto it = a.letters.rbegin(); it != a.letters.rend(); ++it) out.letters.push_back(-*it);
    return out;
  }

  Rational length(const FreeWord& a) const { return Rational(static_cast<std::int64_t>(a.letters.size())); }

  bool is_identity(const FreeWord& a) const { return a.letters.empty(); }

  /// Letters in range; cheap.
  bool compatible(const FreeWord& a) const {
    for (int l : a.letters)
      if (l == 0 || std::abs(l) > rank_) return false;
    return true;
  }

  bool contains(const FreeWord& a) const {
    if (!compatible(a)) return false;
    for (std::size_t i = 1; i < a.letters.size(); ++i)
      if (a.letters[i] == -a.letters[i - 1]) return false;
    return true;
  }

  /// Generators and their inverses, each of length 1.
  std::vector<FreeWord> moves() const {
    std::vector<FreeWord> out;
    for (int i = 1; i <= rank_; ++i) {
      out.push_back(FreeWord{{i}});
      out.push_back(FreeWord{{-i}});
    }
    return out;
  }

  FreeWord reduce(std::vector<int> letters) const {
    FreeWord out;
    for (int l : letters) {
      if (l == 0 || std::abs(l) > rank_) throw ParseError("letter out of range");
      if (!out.letters.empty() && out.letters.back() == -l)
        out.letters.pop_back();
      else
        out.letters.push_back(l);
    }
    return out;
  }

  /// "a1^2 a2^-1"; rank-one groups use the bare letter "a". Identity is "1".
  std::string format(const FreeWord& a) const {
    if (a.letters.empty()) return "1";
    std::string out;
    for (std::size_t i = 0; i < a.letters.size();) {
      std::size_t j = i;
      while (j < a.letters.size() && a.letters[j] == a.letters[i]) ++j;
      int letter = a.letters[i];
      int exponent = static_cast<int>(j - i) * (letter < 0 ? -1 : 1);
      if (!out.empty()) out += ' ';
      out += letter_name(std::abs(letter));
      if (exponent != 1) out += "^" + std::to_string(exponent);
      i = j;
    }
    return out;
  }

  FreeWord parse(std::string_view text) const {
    std::vector<int> letters;
    auto s = detail::trim(text);
    std::size_t pos = 0;
    while (pos < s.size()) {
      while (pos < s.size() && s[pos] == ' ') ++pos;
      if (pos >= s.size()) break;
      auto end = s.find(' ', pos);
      auto token = s.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
      pos = end == std::string_view::npos ? s.size() : end;
      if (token == "1") continue;
      std::int64_t exponent = 1;
      if (auto caret = token.find('^'); caret != std::string_view::npos) {
        exponent = detail::parse_int(token.substr(caret + 1), "exponent");
        token = token.substr(0, caret);
      }
      if (token.empty() || token.front() != 'a') throw ParseError("bad free-group letter '" + std::string(token) + "'");
      int index = 1;
      if (token.size() > 1)
        index = static_cast<int>(detail::parse_int(token.substr(1), "generator index"));
      else if (rank_ != 1)
        throw ParseError("bare letter 'a' is only valid in rank one");
      if (index < 1 || index > rank_) throw ParseError("generator index out of range in '" + std::string(token) + "'");
      for (std::int64_t e = 0; e < std::abs(exponent); ++e) letters.push_back(exponent < 0 ? -index : index);
    }
    return reduce(std::move(letters));
  }

 private:
  std::string letter_name(int i) const { return rank_ == 1 ? std::string("a") : "a" + std::to_string(i); }

  int rank_;
};

}  // namespace rdlab
