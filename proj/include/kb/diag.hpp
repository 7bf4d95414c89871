#ifndef KB_DIAG_HPP
#define KB_DIAG_HPP

#include <stdexcept>
#include <string>

namespace kb {

enum class Severity { error, warning };

/// A located message against a textual input. Line and column are 1-based
/// and index the first character of the offending token.
struct SourceDiagnostic {
    std::string file;
    int line = 0;
    int column = 0;
    std::string message;
    Severity severity = Severity::error;

    std::string str() const {
        std::string s = file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": ";
        s += severity == Severity::error ? "error: " : "warning: ";
        s += message;
        return s;
    }
};

/// Base class of all engine errors.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed textual input; carries the location of the failure.
class ParseError : public Error {
  public:
    explicit ParseError(SourceDiagnostic d) : Error(d.str()), diagnostic_(std::move(d)) {}
    const SourceDiagnostic& diagnostic() const { return diagnostic_; }

  private:
    SourceDiagnostic diagnostic_;
};

/// Precondition violation on an operation (caller bug, not input data).
class ContractError : public Error {
  public:
    using Error::Error;
};

/// A configured resource cap was exceeded (point space, element count, steps).
class LimitError : public Error {
  public:
    using Error::Error;
};

}  // namespace kb

#endif
