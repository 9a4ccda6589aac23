#pragma once

#include <stdexcept>
#include <string>

namespace weakmeas
{

class Error : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

class DimensionError : public Error
{
public:
	using Error::Error;
};

class HermiticityError : public Error
{
public:
	using Error::Error;
};

/// Raised for invalid states: zero vectors, invalid density matrices.
class StateError : public Error
{
public:
	using Error::Error;
};

/// The weak value is undefined because the pre- and postselected states are
/// (numerically) orthogonal.
class UndefinedWeakValue : public Error
{
public:
	using Error::Error;
};

/// Conditioning on an event of (numerically) zero probability.
class EmptyCondition : public Error
{
public:
	using Error::Error;
};

/// A meter fails ⟨m,Bm⟩ = 0 or 2 Im⟨m,BGm⟩ = 1, or a grid is too coarse to
/// realise them.
class CalibrationError : public Error
{
public:
	using Error::Error;
};

class ScheduleError : public Error
{
public:
	using Error::Error;
};

class ConfigError : public Error
{
public:
	using Error::Error;
};

} // namespace weakmeas
