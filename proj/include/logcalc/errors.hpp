#pragma once

#include <stdexcept>

namespace logcalc {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularResolvent : public Error { public: using Error::Error; };
class BranchCutViolation : public Error { public: using Error::Error; };
class ShiftTooSmall : public Error { public: using Error::Error; };
class NoConvergence : public Error { public: using Error::Error; };
class ZeroArgument : public Error { public: using Error::Error; };

class OutOfHorizon : public Error { public: using Error::Error; };
class StepTooSmall : public Error { public: using Error::Error; };
class BadMargin : public Error { public: using Error::Error; };
class CommutationViolated : public Error { public: using Error::Error; };

class QuadratureStall : public Error { public: using Error::Error; };
class StepUnderflow : public Error { public: using Error::Error; };
class GridTooCoarse : public Error { public: using Error::Error; };
class DegenerateData : public Error { public: using Error::Error; };

class ParseError : public Error { public: using Error::Error; };
class SchemaViolation : public Error { public: using Error::Error; };

} // namespace logcalc
