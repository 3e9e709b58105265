#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace thimac {

enum class Errc {
  DuplicateName,
  UnknownParent,
  UnknownThimac,
  DuplicateStage,
  MixedReceiveRefinement,
  DirectionOnNonTransfer,
  IllegalFlowPair,
  UnknownStage,
  ParseError,
  SchemaError,
  InvalidModel,
  EmptyRegion,
  DuplicateLabel,
  UnknownEvent,
  InvalidChronology,
  TooManyEvents,
  TraceNotAccepted,
  InvalidSourceStage,
  ForeignStage,
  EmptyChronology,
  InvalidArgument,
};

inline std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::DuplicateName: return "DuplicateName";
    case Errc::UnknownParent: return "UnknownParent";
    case Errc::UnknownThimac: return "UnknownThimac";
    case Errc::DuplicateStage: return "DuplicateStage";
    case Errc::MixedReceiveRefinement: return "MixedReceiveRefinement";
    case Errc::DirectionOnNonTransfer: return "DirectionOnNonTransfer";
    case Errc::IllegalFlowPair: return "IllegalFlowPair";
    case Errc::UnknownStage: return "UnknownStage";
    case Errc::ParseError: return "ParseError";
    case Errc::SchemaError: return "SchemaError";
    case Errc::InvalidModel: return "InvalidModel";
    case Errc::EmptyRegion: return "EmptyRegion";
    case Errc::DuplicateLabel: return "DuplicateLabel";
    case Errc::UnknownEvent: return "UnknownEvent";
    case Errc::InvalidChronology: return "InvalidChronology";
    case Errc::TooManyEvents: return "TooManyEvents";
    case Errc::TraceNotAccepted: return "TraceNotAccepted";
    case Errc::InvalidSourceStage: return "InvalidSourceStage";
    case Errc::ForeignStage: return "ForeignStage";
    case Errc::EmptyChronology: return "EmptyChronology";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Base of every exception thrown by the library. `code()` identifies the
/// failure; `what()` carries a human-readable message prefixed by the code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace thimac
