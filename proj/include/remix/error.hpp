#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace remix {

/// Every failure the engine can raise. The string form returned by
/// code_name() is the stable machine code exposed over the HTTP API.
enum class ErrorCode {
  FileNotFound,
  ParseError,
  DuplicateId,
  ValidationFailed,
  ImageDecodeFailed,
  AllContentTrimmed,
  EmptyQuery,
  ProviderTimeout,
  ProviderError,
  ZeroVector,
  DimensionMismatch,
  IoError,
  CorruptIndex,
  UnknownExampleId,
  MalformedHeader,
  LineCountMismatch,
  OverlappingHunks,
  MultiFileUnsupported,
  HunkRejected,
  AlreadyApplied,
  InvalidRequest,
  InvalidAnnotation,
  NoPayload,
  PayloadKindMismatch,
  SessionNotFound,
  SessionBusy,
  EmptyHistory,
  EmptyTemplateSet,
  NegativeGrade,
  InvalidConfig,
  NotFound,
};

inline constexpr std::array kAllErrorCodes = {
    ErrorCode::FileNotFound,        ErrorCode::ParseError,
    ErrorCode::DuplicateId,         ErrorCode::ValidationFailed,
    ErrorCode::ImageDecodeFailed,   ErrorCode::AllContentTrimmed,
    ErrorCode::EmptyQuery,          ErrorCode::ProviderTimeout,
    ErrorCode::ProviderError,       ErrorCode::ZeroVector,
    ErrorCode::DimensionMismatch,   ErrorCode::IoError,
    ErrorCode::CorruptIndex,        ErrorCode::UnknownExampleId,
    ErrorCode::MalformedHeader,     ErrorCode::LineCountMismatch,
    ErrorCode::OverlappingHunks,    ErrorCode::MultiFileUnsupported,
    ErrorCode::HunkRejected,        ErrorCode::AlreadyApplied,
    ErrorCode::InvalidRequest,      ErrorCode::InvalidAnnotation,
    ErrorCode::NoPayload,           ErrorCode::PayloadKindMismatch,
    ErrorCode::SessionNotFound,     ErrorCode::SessionBusy,
    ErrorCode::EmptyHistory,        ErrorCode::EmptyTemplateSet,
    ErrorCode::NegativeGrade,       ErrorCode::InvalidConfig,
    ErrorCode::NotFound,
};

/// Pipeline stage of a remix operation at which an error surfaced.
enum class Stage { None, Prompt, Generate, Parse, Patch };

std::string_view code_name(ErrorCode code);
std::string_view stage_name(Stage stage);

/// Structured payload attached to an Error. Which members are set depends
/// on the code: line_no for PARSE_ERROR/MALFORMED_HEADER, hunk_index for
/// hunk errors, subject for ids, field for validation field names or hunk
/// rejection reasons.
struct ErrorDetail {
  std::optional<std::size_t> index;
  std::string subject;
  std::string field;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, ErrorDetail detail = {})
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }
  Stage stage() const noexcept { return stage_; }
  const ErrorDetail& detail() const noexcept { return detail_; }

  Error& with_stage(Stage stage) {
    stage_ = stage;
    return *this;
  }

 private:
  ErrorCode code_;
  Stage stage_ = Stage::None;
  ErrorDetail detail_;
};

}  // namespace remix
