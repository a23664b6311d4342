#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace densewatch {

/// Node identity: 64-bit value, usually a hash of the raw input label.
using NodeId = std::uint64_t;

/// Community identity within one partition.
using CommunityLabel = std::uint32_t;

/// An argument outside its documented range.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An operation applied in the wrong object state (e.g. writing a sealed builder).
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A cross-object precondition violated by the caller (mismatched node sets, absent keys).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Input on which the requested quantity is undefined (e.g. modularity of an empty graph).
class DegenerateInputError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A lookup for a label or key that does not exist.
class LookupError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

} // namespace densewatch
