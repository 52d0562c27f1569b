#pragma once

#include <stdexcept>

namespace mpcfl {

// Base class for every error raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// field / codec
struct ZeroInverse : Error { using Error::Error; };
struct Overflow : Error { using Error::Error; };

// secret sharing
struct BadCount : Error { using Error::Error; };
struct BadDegree : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct DuplicateSlot : Error { using Error::Error; };
struct SlotMismatch : Error { using Error::Error; };
struct InsufficientShares : Error { using Error::Error; };

// simulated network
struct UnknownParty : Error { using Error::Error; };
struct SelfSend : Error { using Error::Error; };
struct Deadlock : Error { using Error::Error; };

// protocols
struct ElectionStalled : Error { using Error::Error; };
struct BadCommittee : Error { using Error::Error; };
struct ProtocolError : Error { using Error::Error; };

// learner
struct DimensionMismatch : Error { using Error::Error; };
struct EmptyDataset : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };

// configuration
struct ConfigError : Error { using Error::Error; };

}  // namespace mpcfl
