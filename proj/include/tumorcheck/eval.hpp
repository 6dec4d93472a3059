#pragma once

#include "tumorcheck/errors.hpp"
#include "tumorcheck/formula.hpp"
#include "tumorcheck/mask.hpp"
#include "tumorcheck/model.hpp"

namespace tumorcheck {

namespace detail {

inline bool compare(std::uint8_t lhs, CmpOp op, int rhs) {
  switch (op) {
    case CmpOp::lt: return lhs < rhs;
    case CmpOp::le: return lhs <= rhs;
    case CmpOp::gt: return lhs > rhs;
    case CmpOp::ge: return lhs >= rhs;
    case CmpOp::eq: return lhs == rhs;
  }
  return false;
}

}  // namespace detail

/// Compositional bottom-up evaluation of a formula over the model.
inline BinaryMask evaluate(const PixelModel& m, const FormulaPtr& formula) {
  if (!formula) throw Error(Errc::malformed_formula, "cannot evaluate a missing formula");
  auto child = [&](const FormulaPtr& node) {
    if (!node) throw Error(Errc::malformed_formula, "formula node with missing operand");
    return evaluate(m, node);
  };
  switch (formula->kind) {
    case FormulaKind::border: return border(m);
    case FormulaKind::intensity_cmp: {
      BinaryMask out = BinaryMask::zeros(m.width, m.height);
      for (std::size_t i = 0; i < out.bits.size(); ++i)
        out.bits[i] = detail::compare(m.intensity[i], formula->op, formula->value);
      return out;
    }
    case FormulaKind::cluster_eq: {
      if (!m.labels)
        throw Error(Errc::unbound_atom, "cluster atom requires a model with segment labels");
      BinaryMask out = BinaryMask::zeros(m.width, m.height);
      for (std::size_t i = 0; i < out.bits.size(); ++i)
        out.bits[i] = (*m.labels)[i] == formula->value;
      return out;
    }
    case FormulaKind::not_: return mask_not(child(formula->left));
    case FormulaKind::and_: return mask_and(child(formula->left), child(formula->right));
    case FormulaKind::or_: return mask_or(child(formula->left), child(formula->right));
    case FormulaKind::ex: return ex(m, child(formula->left));
    case FormulaKind::ef: return ef(m, child(formula->left));
    case FormulaKind::eg: return eg(m, child(formula->left));
    case FormulaKind::connect: {
      BinaryMask first = child(formula->left);
      BinaryMask second = child(formula->right);
      if (!formula->threshold) return connect(m, first, second);
      ScalarField field{first.width, first.height,
                        std::vector<double>(first.bits.begin(), first.bits.end())};
      return connect(m, field, *formula->threshold, second);
    }
    case FormulaKind::str: return str(m, formula->distance, child(formula->left));
    case FormulaKind::increase:
      return increase(m, child(formula->left), child(formula->right));
    case FormulaKind::background: return connect(m, child(formula->left), border(m));
    case FormulaKind::brain:
      return mask_and(mask_not(connect(m, child(formula->left), border(m))),
                      child(formula->right));
  }
  throw Error(Errc::malformed_formula, "unknown formula node");
}

}  // namespace tumorcheck
