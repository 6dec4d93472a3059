#pragma once

#include <stdexcept>
#include <string>

namespace tumorcheck {

enum class Errc {
  malformed_header,
  truncated_data,
  unsupported_maxval,
  degenerate_input,
  dimension_mismatch,
  index_out_of_range,
  unbound_atom,
  malformed_formula,
  syntax_error,
  unknown_identifier,
  out_of_range_literal,
  empty_region,
  empty_training_set,
  length_mismatch,
  bad_header,
  bad_label,
  ragged_row,
  undefined_metric,
  empty_input,
  missing_subdirectory,
  empty_dataset,
  io_error,
};

struct Error : std::runtime_error {
  Errc code;
  Error(Errc c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

}  // namespace tumorcheck
