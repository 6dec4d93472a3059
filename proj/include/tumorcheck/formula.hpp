#pragma once

#include <charconv>
#include <memory>
#include <optional>
#include <string>
#include <system_error>

#include "tumorcheck/errors.hpp"

namespace tumorcheck {

enum class FormulaKind {
  border,
  intensity_cmp,
  cluster_eq,
  not_,
  and_,
  or_,
  ex,
  ef,
  eg,
  connect,
  str,
  increase,
  background,
  brain
};

enum class CmpOp { lt, le, gt, ge, eq };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Immutable AST node. left/right are unused for atoms; threshold only for
/// three-argument connect; distance only for str.
struct Formula {
  FormulaKind kind = FormulaKind::border;
  CmpOp op = CmpOp::lt;
  int value = 0;
  std::optional<double> threshold;
  double distance = 0.0;
  FormulaPtr left;
  FormulaPtr right;
};

namespace f {

inline void require(bool ok, const char* what) {
  if (!ok) throw Error(Errc::malformed_formula, what);
}

inline FormulaPtr border() { return std::make_shared<Formula>(); }

inline FormulaPtr intensity(CmpOp op, int value) {
  require(value >= 0 && value <= 255, "intensity constant outside [0, 255]");
  Formula node;
  node.kind = FormulaKind::intensity_cmp;
  node.op = op;
  node.value = value;
  return std::make_shared<Formula>(node);
}

inline FormulaPtr cluster(int level) {
  require(level >= 0 && level <= 255, "cluster level outside [0, 255]");
  Formula node;
  node.kind = FormulaKind::cluster_eq;
  node.value = level;
  return std::make_shared<Formula>(node);
}

inline FormulaPtr unary(FormulaKind kind, FormulaPtr child) {
  require(child != nullptr, "unary operator with missing operand");
  Formula node;
  node.kind = kind;
  node.left = std::move(child);
  return std::make_shared<Formula>(node);
}

inline FormulaPtr binary(FormulaKind kind, FormulaPtr a, FormulaPtr b) {
  require(a != nullptr && b != nullptr, "binary operator with missing operand");
  Formula node;
  node.kind = kind;
  node.left = std::move(a);
  node.right = std::move(b);
  return std::make_shared<Formula>(node);
}

inline FormulaPtr neg(FormulaPtr a) { return unary(FormulaKind::not_, std::move(a)); }
inline FormulaPtr conj(FormulaPtr a, FormulaPtr b) {
  return binary(FormulaKind::and_, std::move(a), std::move(b));
}
inline FormulaPtr disj(FormulaPtr a, FormulaPtr b) {
  return binary(FormulaKind::or_, std::move(a), std::move(b));
}
inline FormulaPtr ex(FormulaPtr a) { return unary(FormulaKind::ex, std::move(a)); }
inline FormulaPtr ef(FormulaPtr a) { return unary(FormulaKind::ef, std::move(a)); }
inline FormulaPtr eg(FormulaPtr a) { return unary(FormulaKind::eg, std::move(a)); }

inline FormulaPtr connect(FormulaPtr a, FormulaPtr b) {
  return binary(FormulaKind::connect, std::move(a), std::move(b));
}

inline FormulaPtr connect(FormulaPtr a, double threshold, FormulaPtr b) {
  require(threshold >= 0.0 && threshold <= 1.0, "connect threshold outside [0, 1]");
  Formula node;
  node.kind = FormulaKind::connect;
  node.threshold = threshold;
  node.left = std::move(a);
  node.right = std::move(b);
  require(node.left != nullptr && node.right != nullptr, "connect with missing operand");
  return std::make_shared<Formula>(node);
}

inline FormulaPtr str(double distance, FormulaPtr b) {
  require(distance > 0.0, "str distance must be positive");
  Formula node;
  node.kind = FormulaKind::str;
  node.distance = distance;
  node.left = std::move(b);
  require(node.left != nullptr, "str with missing operand");
  return std::make_shared<Formula>(node);
}

inline FormulaPtr increase(FormulaPtr a, FormulaPtr b) {
  return binary(FormulaKind::increase, std::move(a), std::move(b));
}

inline FormulaPtr background(FormulaPtr a) {
  return unary(FormulaKind::background, std::move(a));
}

inline FormulaPtr brain(FormulaPtr a, FormulaPtr b) {
  return binary(FormulaKind::brain, std::move(a), std::move(b));
}

}  // namespace f

inline bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case FormulaKind::border: return true;
    case FormulaKind::intensity_cmp: return a->op == b->op && a->value == b->value;
    case FormulaKind::cluster_eq: return a->value == b->value;
    case FormulaKind::connect:
      if (a->threshold.has_value() != b->threshold.has_value()) return false;
      if (a->threshold && *a->threshold != *b->threshold) return false;
      return equal(a->left, b->left) && equal(a->right, b->right);
    case FormulaKind::str:
      return a->distance == b->distance && equal(a->left, b->left);
    default: return equal(a->left, b->left) && equal(a->right, b->right);
  }
}

namespace detail {

inline std::string real_to_string(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline const char* cmp_text(CmpOp op) {
  switch (op) {
    case CmpOp::lt: return "<";
    case CmpOp::le: return "<=";
    case CmpOp::gt: return ">";
    case CmpOp::ge: return ">=";
    case CmpOp::eq: return "==";
  }
  return "<";
}

}  // namespace detail

/// Canonical rendering: binary connectives fully parenthesized, unary
/// operands parenthesized unless self-delimiting, atoms bare.
inline std::string print(const FormulaPtr& formula) {
  if (!formula) throw Error(Errc::malformed_formula, "cannot print a missing formula");
  auto wrap = [](const FormulaPtr& child) {
    std::string body = print(child);
    switch (child->kind) {
      case FormulaKind::border:
      case FormulaKind::and_:
      case FormulaKind::or_:
      case FormulaKind::connect:
      case FormulaKind::str:
      case FormulaKind::increase:
      case FormulaKind::background:
      case FormulaKind::brain:
        return body;
      default:
        return "(" + body + ")";
    }
  };
  switch (formula->kind) {
    case FormulaKind::border: return "border";
    case FormulaKind::intensity_cmp:
      return std::string("intensity ") + detail::cmp_text(formula->op) + " " +
             std::to_string(formula->value);
    case FormulaKind::cluster_eq: return "cluster == " + std::to_string(formula->value);
    case FormulaKind::not_: return "!" + wrap(formula->left);
    case FormulaKind::and_: return "(" + print(formula->left) + " & " + print(formula->right) + ")";
    case FormulaKind::or_: return "(" + print(formula->left) + " | " + print(formula->right) + ")";
    case FormulaKind::ex: return "EX " + wrap(formula->left);
    case FormulaKind::ef: return "EF " + wrap(formula->left);
    case FormulaKind::eg: return "EG " + wrap(formula->left);
    case FormulaKind::connect:
      if (formula->threshold)
        return "connect(" + print(formula->left) + ", " + detail::real_to_string(*formula->threshold) +
               ", " + print(formula->right) + ")";
      return "connect(" + print(formula->left) + ", " + print(formula->right) + ")";
    case FormulaKind::str:
      return "str(" + detail::real_to_string(formula->distance) + ", " + print(formula->left) + ")";
    case FormulaKind::increase:
      return "increase(" + print(formula->left) + ", " + print(formula->right) + ")";
    case FormulaKind::background: return "background(" + print(formula->left) + ")";
    case FormulaKind::brain:
      return "brain(" + print(formula->left) + ", " + print(formula->right) + ")";
  }
  throw Error(Errc::malformed_formula, "unknown formula node");
}

}  // namespace tumorcheck
