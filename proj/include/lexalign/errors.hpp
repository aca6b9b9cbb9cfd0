#pragma once

#include <stdexcept>
#include <string>

namespace lexalign {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// corpus
struct MalformedCorpus : Error { using Error::Error; };
struct DuplicateRulingId : Error { using Error::Error; };
struct UnrecognizedArticle : Error { using Error::Error; };

// llm client
struct ProviderError : Error { using Error::Error; };
struct BudgetExceeded : Error { using Error::Error; };
struct MalformedTranscript : Error { using Error::Error; };
struct MissingFingerprint : Error { using Error::Error; };
struct InvalidRequest : Error { using Error::Error; };

// extraction
struct MissingPartyBlock : Error { using Error::Error; };
struct EmptyArticleList : Error { using Error::Error; };
struct DuplicateArticle : Error { using Error::Error; };
struct MissingSection : Error { using Error::Error; };

// rubric
struct EmptyGold : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };

// pairs
struct ConflictingLabel : Error { using Error::Error; };
struct UnknownPairId : Error { using Error::Error; };
struct TooFewRulings : Error { using Error::Error; };

// embedding
struct DimensionMismatch : Error { using Error::Error; };
struct ZeroNorm : Error { using Error::Error; };
struct NonFiniteLoss : Error { using Error::Error; };
struct NoPositives : Error { using Error::Error; };

// checked preconditions on operation inputs
struct PreconditionError : Error { using Error::Error; };

// pipeline orchestration
struct PipelineError : Error {
  PipelineError(const std::string& stage, const std::string& message)
      : Error("stage '" + stage + "' failed: " + message), stage_name(stage) {}
  std::string stage_name;
};

}  // namespace lexalign
