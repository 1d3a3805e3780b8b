#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ivprp {

enum class VarKind { Binary, Continuous };
enum class Sense { LessEq, GreaterEq, Equal };

struct Variable {
  std::string name;
  VarKind kind = VarKind::Binary;
  double lower = 0;
  double upper = 1;
};

struct Term {
  int var = 0;
  double coef = 0;
};

/// A named linear row: sum(coef * var) sense rhs. `family` is the row-name
/// prefix (e.g. "c2a") used to group rows in censuses and reports.
struct Constraint {
  std::string name;
  std::string family;
  std::vector<Term> terms;
  Sense sense = Sense::LessEq;
  double rhs = 0;
};

/// Variable names shared by the emitter, the solution parser and the cuts.
namespace names {
inline std::string join(char head, std::initializer_list<int> idx) {
  std::string s(1, head);
  for (int i : idx) s += "_" + std::to_string(i);
  return s;
}
inline std::string x(int i, int j, int e, int s) { return join('x', {i, j, e, s}); }
inline std::string y(int i, int j, int k, int s) { return join('y', {i, j, k, s}); }
inline std::string z(int i, int j, int e, int s) { return join('z', {i, j, e, s}); }
inline std::string b(int i, int e, int s) { return join('b', {i, e, s}); }
inline std::string f(int i, int e, int s) { return join('f', {i, e, s}); }
inline std::string w(int i, int e, int s) { return join('w', {i, e, s}); }
inline std::string u(int s) { return join('u', {s}); }
inline std::string time(int i) { return join('B', {i}); }
}  // namespace names

}  // namespace ivprp
