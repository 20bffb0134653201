#pragma once

#include <stdexcept>
#include <string>

namespace evmag {

/// Base for all domain errors thrown by the simulation library.
class SimError : public std::runtime_error {
public:
    explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

/// An operation was called in a lifecycle phase that does not admit it.
class InvalidPhaseError : public SimError {
public:
    explicit InvalidPhaseError(const std::string& what) : SimError(what) {}
};

/// An argument is outside the operation's stated domain.
class DomainError : public SimError {
public:
    explicit DomainError(const std::string& what) : SimError(what) {}
};

/// Recursive charging exceeded its depth bound (non-terminating configuration).
class DepthExceededError : public SimError {
public:
    explicit DepthExceededError(const std::string& what) : SimError(what) {}
};

/// A record list whose timestamps must be nondecreasing was not.
class UnorderedTraceError : public SimError {
public:
    explicit UnorderedTraceError(const std::string& what) : SimError(what) {}
};

/// Fewer detection samples available than the debounce window needs.
class InsufficientSamplesError : public SimError {
public:
    explicit InsufficientSamplesError(const std::string& what) : SimError(what) {}
};

/// A policy-specific evaluator was invoked with the wrong policy.
class PolicyMismatchError : public SimError {
public:
    explicit PolicyMismatchError(const std::string& what) : SimError(what) {}
};

/// An event was scheduled before the current simulation time.
class PastTimeError : public SimError {
public:
    explicit PastTimeError(const std::string& what) : SimError(what) {}
};

/// A file could not be read or written; the message carries the path.
class IoError : public SimError {
public:
    explicit IoError(const std::string& what) : SimError(what) {}
};

} // namespace evmag
