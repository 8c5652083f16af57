#ifndef FEWMT_ERRORS_HPP
#define FEWMT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fewmt {

// Every library error derives from Error. The category drives the CLI's
// exit code: Validation -> 1, Runtime -> 2.
class Error : public std::runtime_error {
public:
    enum class Category { Validation, Runtime };

    Error(Category category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    Category category() const { return category_; }

private:
    Category category_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message)
        : Error(Category::Validation,
                "parse error at line " + std::to_string(line) + ": " + message),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    ValidationError(std::size_t line, const std::string& reason)
        : Error(Category::Validation,
                "invalid record at line " + std::to_string(line) + ": " + reason),
          line_(line) {}
    explicit ValidationError(const std::string& reason)
        : Error(Category::Validation, reason), line_(0) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class DegenerateInput : public Error {
public:
    explicit DegenerateInput(const std::string& message)
        : Error(Category::Validation, message) {}
};

class InvalidWeights : public Error {
public:
    explicit InvalidWeights(const std::string& message)
        : Error(Category::Validation, message) {}
};

class OutOfRange : public Error {
public:
    explicit OutOfRange(const std::string& message)
        : Error(Category::Validation, message) {}
};

class EmptyInput : public Error {
public:
    explicit EmptyInput(const std::string& message)
        : Error(Category::Validation, message) {}
};

class EmptyTestSet : public Error {
public:
    EmptyTestSet() : Error(Category::Validation, "test set is empty") {}
};

class EmptyQuery : public Error {
public:
    EmptyQuery() : Error(Category::Validation, "query text is empty") {}
};

class EmbeddedNewline : public Error {
public:
    EmbeddedNewline(const std::string& where, std::size_t index)
        : Error(Category::Validation,
                "newline embedded in " + where + " at index " + std::to_string(index)),
          index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

class InsufficientPool : public Error {
public:
    InsufficientPool(const std::string& filter, std::size_t available, std::size_t requested)
        : Error(Category::Validation,
                "pool filter '" + filter + "' leaves " + std::to_string(available) +
                    " entries, need " + std::to_string(requested)),
          available_(available), requested_(requested) {}
    std::size_t available() const { return available_; }
    std::size_t requested() const { return requested_; }

private:
    std::size_t available_;
    std::size_t requested_;
};

class MissingMetadata : public Error {
public:
    explicit MissingMetadata(const std::string& what)
        : Error(Category::Validation, "pool has no entry carrying required metadata: " + what) {}
};

class UnmarkedReference : public Error {
public:
    explicit UnmarkedReference(const std::string& message)
        : Error(Category::Validation, message) {}
};

class MissingForms : public Error {
public:
    MissingForms(const std::string& entry, const std::string& variety)
        : Error(Category::Validation,
                "term table entry '" + entry + "' lacks forms for variety '" + variety + "'") {}
};

class LengthMismatch : public Error {
public:
    LengthMismatch(const std::string& what, std::size_t expected, std::size_t actual,
                   Category category = Category::Validation)
        : Error(category, what + ": expected " + std::to_string(expected) + ", got " +
                              std::to_string(actual)),
          expected_(expected), actual_(actual) {}
    std::size_t expected() const { return expected_; }
    std::size_t actual() const { return actual_; }

private:
    std::size_t expected_;
    std::size_t actual_;
};

class TransportError : public Error {
public:
    explicit TransportError(const std::string& message)
        : Error(Category::Runtime, message) {}
};

class ProtocolError : public Error {
public:
    explicit ProtocolError(const std::string& message)
        : Error(Category::Runtime, message) {}
};

// A definitive (non-retryable) refusal from a remote service, e.g. HTTP 4xx.
class BackendRefused : public Error {
public:
    explicit BackendRefused(const std::string& message)
        : Error(Category::Runtime, message) {}
};

class UnknownQuery : public Error {
public:
    explicit UnknownQuery(const std::string& query)
        : Error(Category::Runtime, "mock backend has no entry for query: " + query) {}
};

class MetricFailure : public Error {
public:
    MetricFailure(std::size_t i, std::size_t j, const std::string& cause)
        : Error(Category::Runtime, "metric failed on pair (" + std::to_string(i) + ", " +
                                       std::to_string(j) + "): " + cause),
          i_(i), j_(j) {}
    std::size_t hypothesis_index() const { return i_; }
    std::size_t reference_index() const { return j_; }

private:
    std::size_t i_;
    std::size_t j_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error(Category::Runtime, message) {}
};

}  // namespace fewmt

#endif  // FEWMT_ERRORS_HPP
