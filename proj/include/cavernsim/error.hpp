#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cavernsim {

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, 0 when unknown.
class ParseError : public Error
{
public:
  ParseError(const std::string& what, int line)
    : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what)
    , line_(line)
  {}

  int line() const noexcept { return line_; }

private:
  int line_;
};

/// Mesh connectivity or boundary tagging is inconsistent.
class TopologyError : public Error
{
public:
  using Error::Error;
};

/// Element with (near) zero area.
class DegenerateElementError : public Error
{
public:
  DegenerateElementError(const std::string& what, int element)
    : Error(what)
    , element_(element)
  {}

  int element() const noexcept { return element_; }

private:
  int element_;
};

/// Configuration value rejected; `path()` names the offending key.
class ValidationError : public Error
{
public:
  ValidationError(const std::string& path, const std::string& what)
    : Error(path.empty() ? what : path + ": " + what)
    , path_(path)
  {}

  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

/// Linear or nonlinear solve failed. `trace()` holds residual norms of the
/// failing Newton loop when available.
class SolverError : public Error
{
public:
  explicit SolverError(const std::string& what, std::vector<double> trace = {})
    : Error(what)
    , trace_(std::move(trace))
  {}

  const std::vector<double>& trace() const noexcept { return trace_; }

private:
  std::vector<double> trace_;
};

/// Damage variable reached 1 where a finite rate was requested.
class DamageSaturatedError : public Error
{
public:
  using Error::Error;
};

} // namespace cavernsim
