#pragma once

#include <stdexcept>
#include <string>

namespace wvlab {

// Every failure raised by the library derives from Error so callers can catch
// one type. Physics-regime failures and parse failures are split so the CLI
// can map them to distinct exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RegimeError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

// |<post|pre>| fell below the denominator floor; the weak value is unstable.
class NearOrthogonalSelection : public RegimeError {
public:
    using RegimeError::RegimeError;
};

class NonOrthogonalPackets : public RegimeError {
public:
    using RegimeError::RegimeError;
};

class SupportOverflow : public RegimeError {
public:
    using RegimeError::RegimeError;
};

class NoCrossing : public RegimeError {
public:
    using RegimeError::RegimeError;
};

class UnboundedBranch : public RegimeError {
public:
    using RegimeError::RegimeError;
};

class TopologyMismatch : public RegimeError {
public:
    using RegimeError::RegimeError;
};

class PostSelectionImpossible : public RegimeError {
public:
    using RegimeError::RegimeError;
};

}  // namespace wvlab
