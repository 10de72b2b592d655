#include "fate421/combination.hpp"

#include "fate421/errors.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

namespace fate421 {

Combination::Combination(int faces) {
  if (faces < 1) throw InvalidCombination("face count must be >= 1");
  occupation_.assign(static_cast<std::size_t>(faces), 0);
}

Combination::Combination(std::vector<int> occupation) : occupation_(std::move(occupation)) {
  if (occupation_.empty()) throw InvalidCombination("face count must be >= 1");
  for (int n : occupation_) {
    if (n < 0) throw InvalidCombination("negative occupation number");
    norm_ += n;
  }
}

Combination Combination::from_faces(std::span<const int> faces, int face_count) {
  Combination c(face_count);
  for (int f : faces) {
    if (f < 1 || f > face_count)
      throw InvalidCombination("face " + std::to_string(f) + " outside 1.." + std::to_string(face_count));
    ++c.occupation_[static_cast<std::size_t>(f - 1)];
    ++c.norm_;
  }
  return c;
}

Combination Combination::parse(std::string_view text, int face_count) {
  std::vector<int> faces;
  auto trimmed = text;
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) trimmed.remove_prefix(1);
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) trimmed.remove_suffix(1);
  if (trimmed.empty() || trimmed == "-") return Combination(face_count);

  if (trimmed.front() == '[') {
    if (trimmed.back() != ']') throw InvalidCombination("unterminated face list '" + std::string(text) + "'");
    trimmed = trimmed.substr(1, trimmed.size() - 2);
    int value = 0;
    bool have_digit = false;
    for (char ch : trimmed) {
      if (std::isdigit(static_cast<unsigned char>(ch))) {
        value = value * 10 + (ch - '0');
        have_digit = true;
      } else if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
        if (have_digit) faces.push_back(value);
        value = 0;
        have_digit = false;
      } else {
        throw InvalidCombination("bad character in face list '" + std::string(text) + "'");
      }
    }
    if (have_digit) faces.push_back(value);
  } else {
    for (char ch : trimmed) {
      if (!std::isdigit(static_cast<unsigned char>(ch)))
        throw InvalidCombination("bad character in combination '" + std::string(text) + "'");
      faces.push_back(ch - '0');
    }
  }
  return from_faces(faces, face_count);
}

std::vector<int> Combination::increasing_faces() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(norm_));
  for (int f = 1; f <= faces(); ++f)
    for (int k = 0; k < count(f); ++k) out.push_back(f);
  return out;
}

int Combination::face_sum() const {
  int s = 0;
  for (int f = 1; f <= faces(); ++f) s += f * count(f);
  return s;
}

int Combination::distinct_faces() const {
  return static_cast<int>(std::count_if(occupation_.begin(), occupation_.end(), [](int n) { return n > 0; }));
}

bool Combination::is_brelan() const { return norm_ > 0 && distinct_faces() == 1; }

std::string Combination::to_string() const {
  auto list = increasing_faces();
  std::reverse(list.begin(), list.end());
  std::string out;
  if (faces() <= 9) {
    for (int f : list) out.push_back(static_cast<char>('0' + f));
    return out;
  }
  out = "[";
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(list[i]);
  }
  return out + "]";
}

bool Combination::within(const Combination& other) const {
  if (faces() != other.faces()) return false;
  for (std::size_t i = 0; i < occupation_.size(); ++i)
    if (occupation_[i] > other.occupation_[i]) return false;
  return true;
}

Combination Combination::permuted(std::span<const int> image) const {
  if (static_cast<int>(image.size()) != faces()) throw InvalidCombination("permutation size mismatch");
  Combination out(faces());
  for (int f = 1; f <= faces(); ++f) {
    int g = image[static_cast<std::size_t>(f - 1)];
    if (g < 1 || g > faces()) throw InvalidCombination("permutation image out of range");
    out.occupation_[static_cast<std::size_t>(g - 1)] += count(f);
  }
  out.norm_ = norm_;
  return out;
}

Combination& Combination::operator+=(const Combination& other) {
  if (faces() != other.faces()) throw InvalidCombination("face count mismatch");
  for (std::size_t i = 0; i < occupation_.size(); ++i) occupation_[i] += other.occupation_[i];
  norm_ += other.norm_;
  return *this;
}

Combination& Combination::operator-=(const Combination& other) {
  if (faces() != other.faces()) throw InvalidCombination("face count mismatch");
  for (std::size_t i = 0; i < occupation_.size(); ++i) {
    occupation_[i] -= other.occupation_[i];
    if (occupation_[i] < 0) throw InvalidCombination("difference is not a combination");
  }
  norm_ -= other.norm_;
  return *this;
}

Combination Combination::unit(int face, int face_count) {
  const int faces[] = {face};
  return from_faces(faces, face_count);
}

Combination meet(const Combination& a, const Combination& b) {
  if (a.faces() != b.faces()) throw InvalidCombination("face count mismatch");
  std::vector<int> m(a.occupation().size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::min(a.occupation()[i], b.occupation()[i]);
  return Combination(std::move(m));
}

bool lagrangian_less(const Combination& a, const Combination& b) {
  if (a.norm() != b.norm()) return a.norm() < b.norm();
  auto la = a.increasing_faces();
  auto lb = b.increasing_faces();
  return la < lb;
}

namespace {

void fill_norm(int face, int remaining, std::vector<int>& current, std::vector<Combination>& out) {
  const int faces = static_cast<int>(current.size());
  if (face == faces - 1) {
    current[static_cast<std::size_t>(face)] = remaining;
    out.emplace_back(current);
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    current[static_cast<std::size_t>(face)] = k;
    fill_norm(face + 1, remaining - k, current, out);
  }
}

}  // namespace

std::vector<Combination> combinations_of_norm(int n, int faces) {
  if (n < 0) throw InvalidCombination("negative norm");
  if (faces < 1) throw InvalidCombination("face count must be >= 1");
  std::vector<Combination> out;
  std::vector<int> current(static_cast<std::size_t>(faces), 0);
  fill_norm(0, n, current, out);
  return out;
}

std::vector<Combination> combinations_up_to(int n, int faces) {
  std::vector<Combination> out;
  for (int k = 0; k <= n; ++k) {
    auto layer = combinations_of_norm(k, faces);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

std::vector<Combination> subcombinations(const Combination& c) {
  std::vector<Combination> out{Combination(c.faces())};
  for (int f = 1; f <= c.faces(); ++f) {
    std::vector<Combination> next;
    next.reserve(out.size() * static_cast<std::size_t>(c.count(f) + 1));
    for (const auto& base : out) {
      Combination k = base;
      next.push_back(k);
      for (int m = 1; m <= c.count(f); ++m) {
        k += Combination::unit(f, c.faces());
        next.push_back(k);
      }
    }
    out = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t CombinationHash::operator()(const Combination& c) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (int n : c.occupation()) {
    h ^= static_cast<std::size_t>(n) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

}  // namespace fate421
