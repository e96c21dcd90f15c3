#pragma once

#include <stdexcept>
#include <string>

namespace dlmo {

// Error taxonomy. The category drives the CLI exit code:
//   config  -> 1 (bad flags, bad config/spec files, caller contract breaches)
//   data    -> 2 (malformed or inconsistent input data, unusable model files)
//   numeric -> 3 (divergence, non-finite results)
enum class ErrorCategory { config = 1, data = 2, numeric = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory cat, const std::string& msg)
        : std::runtime_error(msg), cat_(cat) {}
    ErrorCategory category() const noexcept { return cat_; }
    int exit_code() const noexcept { return static_cast<int>(cat_); }

private:
    ErrorCategory cat_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error(ErrorCategory::config, m) {}
};

// Invalid cohort/simulation spec; message names the offending field.
struct SpecError : ConfigError {
    explicit SpecError(const std::string& m) : ConfigError(m) {}
};

struct DataError : Error {
    explicit DataError(const std::string& m) : Error(ErrorCategory::data, m) {}
};

// Malformed row or field; carries file and 1-based line number.
struct ParseError : DataError {
    ParseError(const std::string& file, std::size_t line, const std::string& m)
        : DataError(file + ":" + std::to_string(line) + ": " + m),
          file_(file), line_(line) {}
    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

// A domain invariant does not hold for otherwise well-formed data.
struct ValidationError : DataError {
    explicit ValidationError(const std::string& m) : DataError(m) {}
};

struct IoError : DataError {
    explicit IoError(const std::string& m) : DataError(m) {}
};

struct SchemaVersionError : DataError {
    explicit SchemaVersionError(const std::string& m) : DataError(m) {}
};

// Argument outside a function's domain (e.g. negative lux).
struct DomainError : ConfigError {
    explicit DomainError(const std::string& m) : ConfigError(m) {}
};

struct InvalidInterval : ValidationError {
    explicit InvalidInterval(const std::string& m) : ValidationError(m) {}
};

struct LengthMismatch : ConfigError {
    explicit LengthMismatch(const std::string& m) : ConfigError(m) {}
};

struct ShapeMismatch : ConfigError {
    explicit ShapeMismatch(const std::string& m) : ConfigError(m) {}
};

struct EmptyInput : ConfigError {
    explicit EmptyInput(const std::string& m) : ConfigError(m) {}
};

struct DegenerateTarget : ConfigError {
    explicit DegenerateTarget(const std::string& m) : ConfigError(m) {}
};

struct InsufficientData : DataError {
    explicit InsufficientData(const std::string& m) : DataError(m) {}
};

struct TooFewParticipants : DataError {
    explicit TooFewParticipants(const std::string& m) : DataError(m) {}
};

struct MissingSleepRecord : DataError {
    explicit MissingSleepRecord(const std::string& m) : DataError(m) {}
};

// A window-internal missing run longer than the imputation bound.
struct ExcessiveGap : DataError {
    ExcessiveGap(const std::string& channel, int run_hours)
        : DataError("missing run of " + std::to_string(run_hours) +
                    " h in channel " + channel + " exceeds the imputation bound"),
          channel_(channel), run_hours_(run_hours) {}
    const std::string& channel() const noexcept { return channel_; }
    int run_hours() const noexcept { return run_hours_; }

private:
    std::string channel_;
    int run_hours_;
};

struct InsufficientHistory : DataError {
    InsufficientHistory(int available, int required)
        : DataError("only " + std::to_string(available) + " of " +
                    std::to_string(required) + " preceding days have sleep records"),
          available_(available), required_(required) {}
    int available() const noexcept { return available_; }
    int required() const noexcept { return required_; }

private:
    int available_;
    int required_;
};

// Melatonin profile never reaches the threshold.
struct NoOnset : DataError {
    explicit NoOnset(const std::string& m) : DataError(m) {}
};

// First sample already at or above threshold: onset not observed.
struct AlreadyAbove : DataError {
    explicit AlreadyAbove(const std::string& m) : DataError(m) {}
};

struct TooFewSamples : DataError {
    explicit TooFewSamples(const std::string& m) : DataError(m) {}
};

struct NumericError : Error {
    explicit NumericError(const std::string& m) : Error(ErrorCategory::numeric, m) {}
};

// Training loss became NaN/inf; carries the epoch where it happened.
struct NonFiniteLoss : NumericError {
    NonFiniteLoss(int epoch, const std::string& stage)
        : NumericError("non-finite loss at epoch " + std::to_string(epoch) +
                       " of " + stage),
          epoch_(epoch) {}
    int epoch() const noexcept { return epoch_; }

private:
    int epoch_;
};

}  // namespace dlmo
