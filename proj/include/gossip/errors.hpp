#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gossip {

/// Bad argument or misaligned inputs (CLI exit code 2).
class invalid_parameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Data violating an algorithm assumption, e.g. duplicates in no-ties mode.
class invalid_input : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Random graph generation ran out of retries (CLI exit code 3).
class generation_failure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure raised while a gossip estimator processes an edge (CLI exit code 4).
class estimator_failure : public std::runtime_error {
public:
    explicit estimator_failure(const std::string& what, std::uint64_t tick = 0)
        : std::runtime_error(what), tick_(tick) {}

    std::uint64_t tick() const noexcept { return tick_; }

private:
    std::uint64_t tick_;
};

}  // namespace gossip
