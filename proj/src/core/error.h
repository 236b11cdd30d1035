#pragma once

#include <stdexcept>
#include <string>

namespace fbar {

enum class Errc {
    invalid,    // bad argument or violated invariant
    parse,      // malformed input text
    io,         // filesystem failure
    numeric,    // numeric failure, no convergence, insufficient data
    not_found,  // lookup miss
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

} // namespace fbar
