#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace desgraph {

enum class ErrorKind {
  DuplicateFactor,
  UnknownFactor,
  UnknownParent,
  EmptySpec,
  InvalidSpec,
  FewerThanTwoParents,
  IncompleteRules,
  NoTreatments,
  UnknownUnit,
  TargetNotAUnit,
  RoleMismatch,
  SelfAllotment,
  DuplicateAllotment,
  NoAllotment,
  UnknownOrdering,
  ReservedName,
  DuplicateOrdering,
  LengthMismatch,
  InvalidAssignment,
  ConstraintRefersToNonAncestor,
  ConditionalParentUnassigned,
  BadConstraintArity,
  RowCountMismatch,
  CycleDetected,
  NotConvertible,
  UnassignedTreatments,
  UnknownColumn,
  UnknownRecord,
  ContradictoryBounds,
  ConflictingRule,
  TargetExists,
  IoFailure,
  BadName,
  UnknownRecordColumn,
  UnknownProcess,
  ShapeMismatch,
  InconsistentCensor,
  UnknownKind,
  InvalidParams,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-checkable kind.
class DesignError : public std::runtime_error {
 public:
  DesignError(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace desgraph
