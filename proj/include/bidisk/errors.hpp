#pragma once

#include <stdexcept>
#include <string>

namespace bidisk {

// How an error should be classified by a caller that must turn failures
// into process exit codes: bad input, a negative mathematical verdict, or
// a computation that could not decide at the requested tolerance.
enum class ErrorClass { input, verdict, numeric };

class Error : public std::runtime_error {
public:
    Error(std::string code, ErrorClass cls, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)), class_(cls) {}

    const std::string& code() const noexcept { return code_; }
    ErrorClass error_class() const noexcept { return class_; }

private:
    std::string code_;
    ErrorClass class_;
};

struct InputError : Error {
    explicit InputError(const std::string& m) : Error("Input", ErrorClass::input, m) {}
};
struct LevelMismatchError : Error {
    explicit LevelMismatchError(const std::string& m) : Error("LevelMismatch", ErrorClass::input, m) {}
};
struct NonHermitianError : Error {
    explicit NonHermitianError(const std::string& m) : Error("NonHermitian", ErrorClass::numeric, m) {}
};
struct ZeroSliceError : Error {
    explicit ZeroSliceError(const std::string& m) : Error("ZeroSlice", ErrorClass::input, m) {}
};
struct HeadroomOverflowError : Error {
    explicit HeadroomOverflowError(const std::string& m) : Error("Overflow", ErrorClass::input, m) {}
};
struct WindowTooSmallError : Error {
    explicit WindowTooSmallError(const std::string& m) : Error("WindowTooSmall", ErrorClass::input, m) {}
};
struct NoConvergenceError : Error {
    explicit NoConvergenceError(const std::string& m) : Error("NoConvergence", ErrorClass::numeric, m) {}
};
struct DensityNotPositiveError : Error {
    explicit DensityNotPositiveError(const std::string& m) : Error("DensityNotPositive", ErrorClass::verdict, m) {}
};
struct ZeroOnCircleError : Error {
    explicit ZeroOnCircleError(const std::string& m) : Error("ZeroOnCircle", ErrorClass::verdict, m) {}
};
struct ZeroOnTorusError : Error {
    explicit ZeroOnTorusError(const std::string& m) : Error("ZeroOnTorus", ErrorClass::verdict, m) {}
};
struct DegenerateError : Error {
    explicit DegenerateError(const std::string& m) : Error("Degenerate", ErrorClass::verdict, m) {}
};
struct BadSpecError : Error {
    explicit BadSpecError(const std::string& m) : Error("BadSpec", ErrorClass::input, m) {}
};
struct GwConditionFailsError : Error {
    explicit GwConditionFailsError(const std::string& m) : Error("GwConditionFails", ErrorClass::verdict, m) {}
};
struct NotDivisibleError : Error {
    explicit NotDivisibleError(const std::string& m) : Error("NotDivisible", ErrorClass::numeric, m) {}
};
struct NotStableError : Error {
    explicit NotStableError(const std::string& m) : Error("NotStable", ErrorClass::verdict, m) {}
};
struct InconclusiveError : Error {
    explicit InconclusiveError(const std::string& m) : Error("Inconclusive", ErrorClass::numeric, m) {}
};

} // namespace bidisk
