#include "desgraph/error.hpp"
#include "desgraph/types.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace desgraph {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DuplicateFactor: return "DuplicateFactor";
    case ErrorKind::UnknownFactor: return "UnknownFactor";
    case ErrorKind::UnknownParent: return "UnknownParent";
    case ErrorKind::EmptySpec: return "EmptySpec";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::FewerThanTwoParents: return "FewerThanTwoParents";
    case ErrorKind::IncompleteRules: return "IncompleteRules";
    case ErrorKind::NoTreatments: return "NoTreatments";
    case ErrorKind::UnknownUnit: return "UnknownUnit";
    case ErrorKind::TargetNotAUnit: return "TargetNotAUnit";
    case ErrorKind::RoleMismatch: return "RoleMismatch";
    case ErrorKind::SelfAllotment: return "SelfAllotment";
    case ErrorKind::DuplicateAllotment: return "DuplicateAllotment";
    case ErrorKind::NoAllotment: return "NoAllotment";
    case ErrorKind::UnknownOrdering: return "UnknownOrdering";
    case ErrorKind::ReservedName: return "ReservedName";
    case ErrorKind::DuplicateOrdering: return "DuplicateOrdering";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::InvalidAssignment: return "InvalidAssignment";
    case ErrorKind::ConstraintRefersToNonAncestor: return "ConstraintRefersToNonAncestor";
    case ErrorKind::ConditionalParentUnassigned: return "ConditionalParentUnassigned";
    case ErrorKind::BadConstraintArity: return "BadConstraintArity";
    case ErrorKind::RowCountMismatch: return "RowCountMismatch";
    case ErrorKind::CycleDetected: return "CycleDetected";
    case ErrorKind::NotConvertible: return "NotConvertible";
    case ErrorKind::UnassignedTreatments: return "UnassignedTreatments";
    case ErrorKind::UnknownColumn: return "UnknownColumn";
    case ErrorKind::UnknownRecord: return "UnknownRecord";
    case ErrorKind::ContradictoryBounds: return "ContradictoryBounds";
    case ErrorKind::ConflictingRule: return "ConflictingRule";
    case ErrorKind::TargetExists: return "TargetExists";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::BadName: return "BadName";
    case ErrorKind::UnknownRecordColumn: return "UnknownRecordColumn";
    case ErrorKind::UnknownProcess: return "UnknownProcess";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::InconsistentCensor: return "InconsistentCensor";
    case ErrorKind::UnknownKind: return "UnknownKind";
    case ErrorKind::InvalidParams: return "InvalidParams";
  }
  return "Unknown";
}

std::string_view role_tag(Role role) noexcept {
  switch (role) {
    case Role::Unit: return "unit";
    case Role::Treatment: return "trt";
    case Role::Record: return "rcrd";
  }
  return "";
}

char role_letter(Role role) noexcept {
  switch (role) {
    case Role::Unit: return 'U';
    case Role::Treatment: return 'T';
    case Role::Record: return 'R';
  }
  return '?';
}

std::string_view type_tag(ValueType type) noexcept {
  switch (type) {
    case ValueType::Text: return "<chr>";
    case ValueType::Integer: return "<int>";
    case ValueType::Numeric: return "<dbl>";
  }
  return "";
}

std::string format_number(double value) {
  if (std::isnan(value)) return "NA";
  if (value == 0) return "0";  // folds -0
  std::array<char, 64> buf{};
  if (std::abs(value) < 1e15 && value == std::floor(value)) {
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(),
                                   static_cast<long long>(value));
    return std::string(buf.data(), end);
  }
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

std::string scalar_to_string(const Scalar& value) {
  if (const auto* s = std::get_if<std::string>(&value)) return *s;
  return format_number(std::get<double>(value));
}

}  // namespace desgraph
