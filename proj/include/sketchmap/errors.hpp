#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sketchmap {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class WidthError : public Error {
 public:
  using Error::Error;
};

class ArityError : public Error {
 public:
  using Error::Error;
};

enum class WellFormednessKind { W1, W2, W3, W4, W5, W6, Width };

std::string to_string(WellFormednessKind kind);

class WellFormednessError : public Error {
 public:
  WellFormednessError(WellFormednessKind kind, std::vector<std::uint32_t> ids, const std::string& what);

  WellFormednessKind kind() const { return kind_; }
  const std::vector<std::uint32_t>& ids() const { return ids_; }

 private:
  WellFormednessKind kind_;
  std::vector<std::uint32_t> ids_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class MissingAssignment : public Error {
 public:
  using Error::Error;
};

class HorizonExceeded : public Error {
 public:
  using Error::Error;
};

class FreeVarMismatch : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

class MissingInit : public Error {
 public:
  using Error::Error;
};

class MultipleOutputs : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class UnknownInterface : public Error {
 public:
  using Error::Error;
};

class ModelLoadError : public Error {
 public:
  using Error::Error;
};

class WidthMismatch : public Error {
 public:
  using Error::Error;
};

class NoImplementation : public Error {
 public:
  using Error::Error;
};

class NotStructural : public Error {
 public:
  NotStructural(std::uint32_t id, const std::string& what) : Error(what), id_(id) {}
  std::uint32_t id() const { return id_; }

 private:
  std::uint32_t id_;
};

class JsonSchemaError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class AllSolversFailed : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Raised when a synthesized result disagrees with the concrete interpreter.
class SoundnessFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace sketchmap
