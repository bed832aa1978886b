#ifndef MEMAP_ERROR_HPP
#define MEMAP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace memap {

    struct InvalidDescriptor : std::invalid_argument {
        using std::invalid_argument::invalid_argument;
    };

    struct InvalidArgument : std::invalid_argument {
        using std::invalid_argument::invalid_argument;
    };

    struct InvalidConfig : std::invalid_argument {
        using std::invalid_argument::invalid_argument;
    };

    struct EmptyArchive : std::logic_error {
        EmptyArchive() : std::logic_error("archive is empty") {}
    };

    struct EmitterExhausted : std::logic_error {
        EmitterExhausted() : std::logic_error("emitter is exhausted") {}
    };

    struct InvariantViolation : std::logic_error {
        using std::logic_error::logic_error;
    };

    struct InsufficientData : std::invalid_argument {
        using std::invalid_argument::invalid_argument;
    };

    struct RunOutputError : std::runtime_error {
        using std::runtime_error::runtime_error;
    };

    /// Configuration error carrying the offending field name.
    struct ConfigError : std::invalid_argument {
        ConfigError(std::string field, const std::string& what)
            : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
        const std::string& field() const noexcept { return field_; }

    private:
        std::string field_;
    };

} // namespace memap

#endif
