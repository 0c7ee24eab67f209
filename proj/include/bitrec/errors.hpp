#pragma once

#include <stdexcept>
#include <string>

namespace bitrec {

// Raised when inputs violate a documented precondition that the caller
// could have checked (bad plane index, shape mismatch, q out of range).
using invalid_argument = std::invalid_argument;

// Raised when the data itself breaks a cross-input contract, e.g. the
// "quantized" operand of residual() has stale low bits.
class contract_violation : public std::logic_error {
public:
    explicit contract_violation(const std::string& what) : std::logic_error(what) {}
};

// Raised by decoders/loaders on malformed bytes. Carries the offset of
// the first offending byte when known (npos otherwise).
class format_error : public std::runtime_error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    explicit format_error(const std::string& what, std::size_t byte_offset = npos)
        : std::runtime_error(what), offset_(byte_offset) {}

    std::size_t byte_offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace bitrec
