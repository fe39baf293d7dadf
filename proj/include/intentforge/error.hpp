#pragma once

#include <stdexcept>
#include <string>

namespace intentforge {

// Base of every domain error. `kind()` is the stable name surfaced by the CLI
// in structured (JSON) error output.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define INTENTFORGE_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                          \
    public:                                                              \
        explicit Name(const std::string& message) : Error(#Name, message) {} \
    }

INTENTFORGE_DEFINE_ERROR(IndexWriteError);
INTENTFORGE_DEFINE_ERROR(IndexReadError);
INTENTFORGE_DEFINE_ERROR(IndexIntegrityError);
INTENTFORGE_DEFINE_ERROR(UnknownEntityError);
INTENTFORGE_DEFINE_ERROR(EmptyProjectError);
INTENTFORGE_DEFINE_ERROR(SourceReadError);
INTENTFORGE_DEFINE_ERROR(EmptyCorpusError);
INTENTFORGE_DEFINE_ERROR(InsufficientCorpusError);
INTENTFORGE_DEFINE_ERROR(EmbeddingProviderError);
INTENTFORGE_DEFINE_ERROR(MalformedOutputError);
INTENTFORGE_DEFINE_ERROR(IntentionSynthesisError);
INTENTFORGE_DEFINE_ERROR(ProviderError);
INTENTFORGE_DEFINE_ERROR(ReplayMissError);
INTENTFORGE_DEFINE_ERROR(RunnerConfigError);
INTENTFORGE_DEFINE_ERROR(ReportParseError);
INTENTFORGE_DEFINE_ERROR(MissingCoverageError);
INTENTFORGE_DEFINE_ERROR(EmptyAggregateError);
INTENTFORGE_DEFINE_ERROR(ConfigError);

#undef INTENTFORGE_DEFINE_ERROR

}  // namespace intentforge
