#include "remix/error.hpp"

namespace remix {

std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound: return "FILE_NOT_FOUND";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::DuplicateId: return "DUPLICATE_ID";
    case ErrorCode::ValidationFailed: return "VALIDATION_FAILED";
    case ErrorCode::ImageDecodeFailed: return "IMAGE_DECODE_FAILED";
    case ErrorCode::AllContentTrimmed: return "ALL_CONTENT_TRIMMED";
    case ErrorCode::EmptyQuery: return "EMPTY_QUERY";
    case ErrorCode::ProviderTimeout: return "PROVIDER_TIMEOUT";
    case ErrorCode::ProviderError: return "PROVIDER_ERROR";
    case ErrorCode::ZeroVector: return "ZERO_VECTOR";
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::IoError: return "IO_ERROR";
    case ErrorCode::CorruptIndex: return "CORRUPT_INDEX";
    case ErrorCode::UnknownExampleId: return "UNKNOWN_EXAMPLE_ID";
    case ErrorCode::MalformedHeader: return "MALFORMED_HEADER";
    case ErrorCode::LineCountMismatch: return "LINE_COUNT_MISMATCH";
    case ErrorCode::OverlappingHunks: return "OVERLAPPING_HUNKS";
    case ErrorCode::MultiFileUnsupported: return "MULTI_FILE_UNSUPPORTED";
    case ErrorCode::HunkRejected: return "HUNK_REJECTED";
    case ErrorCode::AlreadyApplied: return "ALREADY_APPLIED";
    case ErrorCode::InvalidRequest: return "INVALID_REQUEST";
    case ErrorCode::InvalidAnnotation: return "INVALID_ANNOTATION";
    case ErrorCode::NoPayload: return "NO_PAYLOAD";
    case ErrorCode::PayloadKindMismatch: return "PAYLOAD_KIND_MISMATCH";
    case ErrorCode::SessionNotFound: return "SESSION_NOT_FOUND";
    case ErrorCode::SessionBusy: return "SESSION_BUSY";
    case ErrorCode::EmptyHistory: return "EMPTY_HISTORY";
    case ErrorCode::EmptyTemplateSet: return "EMPTY_TEMPLATE_SET";
    case ErrorCode::NegativeGrade: return "NEGATIVE_GRADE";
    case ErrorCode::InvalidConfig: return "INVALID_CONFIG";
    case ErrorCode::NotFound: return "NOT_FOUND";
  }
  return "UNKNOWN";
}

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::None: return "";
    case Stage::Prompt: return "PROMPT";
    case Stage::Generate: return "GENERATE";
    case Stage::Parse: return "PARSE";
    case Stage::Patch: return "PATCH";
  }
  return "";
}

}  // namespace remix
