#pragma once

#include <stdexcept>
#include <string>

namespace etclab {

/// Base class for all errors raised by the toolkit. name() is the stable
/// identifier printed on stderr by the CLI.
class EtcError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* name() const { return "EtcError"; }
};

/// A computation produced non-finite values.
class NumericalOverflow : public EtcError {
 public:
  using EtcError::EtcError;
  const char* name() const override { return "NumericalOverflow"; }
};

/// An eigensolver or factorization did not converge.
class NumericalFailure : public EtcError {
 public:
  using EtcError::EtcError;
  const char* name() const override { return "NumericalFailure"; }
};

/// Two consecutive events were closer than the configured floor.
class ZenoDetected : public EtcError {
 public:
  ZenoDetected(double last_event_time, const std::string& what)
      : EtcError(what), last_event_time(last_event_time) {}
  const char* name() const override { return "ZenoDetected"; }
  double last_event_time;
};

/// The closed-loop matrix has an eigenvalue with nonnegative real part.
class NotHurwitz : public EtcError {
 public:
  using EtcError::EtcError;
  const char* name() const override { return "NotHurwitz"; }
};

/// The Lyapunov-decrease threshold was queried past its expiry time.
class ThresholdExpired : public EtcError {
 public:
  using EtcError::EtcError;
  const char* name() const override { return "ThresholdExpired"; }
};

/// The self-triggered condition already holds at the smallest candidate.
class NoValidCandidate : public EtcError {
 public:
  using EtcError::EtcError;
  const char* name() const override { return "NoValidCandidate"; }
};

/// Inter-event-time query at the origin.
class DegenerateState : public EtcError {
 public:
  using EtcError::EtcError;
  const char* name() const override { return "DegenerateState"; }
};

/// Taylor approximation requested along a null direction of A+BK.
class SingularDirection : public EtcError {
 public:
  using EtcError::EtcError;
  const char* name() const override { return "SingularDirection"; }
};

/// Operation not defined for the given dimension or spectrum.
class Unsupported : public EtcError {
 public:
  using EtcError::EtcError;
  const char* name() const override { return "Unsupported"; }
};

/// Optimal threshold undefined for zero trade-off weight.
class ZeroTradeoff : public EtcError {
 public:
  using EtcError::EtcError;
  const char* name() const override { return "ZeroTradeoff"; }
};

/// Quantizer precision too small to satisfy the contraction contract.
class QuantizerTooCoarse : public EtcError {
 public:
  using EtcError::EtcError;
  const char* name() const override { return "QuantizerTooCoarse"; }
};

/// Invalid or malformed experiment configuration.
class ConfigError : public EtcError {
 public:
  using EtcError::EtcError;
  const char* name() const override { return "ConfigError"; }
};

}  // namespace etclab
