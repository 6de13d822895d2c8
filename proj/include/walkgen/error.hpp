#pragma once

#include <stdexcept>
#include <string>

namespace walkgen {

// Domain failure codes. The CLI maps every one of these to exit code 1;
// usage problems exit with 2.
enum class Errc {
  tadpole_edge,
  nonpositive_length,
  dangling_reference,
  disconnected_graph,
  duplicate_id,
  no_external_lines,
  unknown_edge,
  unknown_vertex,
  not_a_walk,
  shape_mismatch,
  no_internal_lines,
  singular_d,
  singular_pencil,
  rank_deficient,
  inconsistent_system,
  too_many_internal_lines,
  exp_overflow,
  zero_denominator,
  zero_beta,
  zero_entry,
  not_stochastic,
  columns_not_equal,
  multi_edge,
  not_normalized,
  isolated_remainder,
  residual_too_large,
  bad_file,
  bad_argument,
};

constexpr const char* errc_name(Errc c) noexcept {
  switch (c) {
    case Errc::tadpole_edge: return "TadpoleEdge";
    case Errc::nonpositive_length: return "NonpositiveLength";
    case Errc::dangling_reference: return "DanglingReference";
    case Errc::disconnected_graph: return "DisconnectedGraph";
    case Errc::duplicate_id: return "DuplicateId";
    case Errc::no_external_lines: return "NoExternalLines";
    case Errc::unknown_edge: return "UnknownEdge";
    case Errc::unknown_vertex: return "UnknownVertex";
    case Errc::not_a_walk: return "NotAWalk";
    case Errc::shape_mismatch: return "ShapeMismatch";
    case Errc::no_internal_lines: return "NoInternalLines";
    case Errc::singular_d: return "SingularD";
    case Errc::singular_pencil: return "SingularPencil";
    case Errc::rank_deficient: return "RankDeficient";
    case Errc::inconsistent_system: return "InconsistentSystem";
    case Errc::too_many_internal_lines: return "TooManyInternalLines";
    case Errc::exp_overflow: return "Overflow";
    case Errc::zero_denominator: return "ZeroDenominator";
    case Errc::zero_beta: return "ZeroBeta";
    case Errc::zero_entry: return "ZeroEntry";
    case Errc::not_stochastic: return "NotStochastic";
    case Errc::columns_not_equal: return "ColumnsNotEqual";
    case Errc::multi_edge: return "MultiEdge";
    case Errc::not_normalized: return "NotNormalized";
    case Errc::isolated_remainder: return "IsolatedRemainder";
    case Errc::residual_too_large: return "ResidualTooLarge";
    case Errc::bad_file: return "BadFile";
    case Errc::bad_argument: return "BadArgument";
  }
  return "Error";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace walkgen
