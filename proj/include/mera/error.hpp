#pragma once

#include <stdexcept>
#include <string>

namespace mera {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MERA_DEFINE_ERROR(Name)            \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

// environment
MERA_DEFINE_ERROR(EpisodeFinished);
MERA_DEFINE_ERROR(IllegalAction);
// state / learn
MERA_DEFINE_ERROR(DimensionMismatch);
// nav
MERA_DEFINE_ERROR(InvalidStart);
// skills
MERA_DEFINE_ERROR(UnknownSkill);
MERA_DEFINE_ERROR(DuplicateName);
MERA_DEFINE_ERROR(NoLegalMove);
MERA_DEFINE_ERROR(InvalidArgument);
// trajectories
MERA_DEFINE_ERROR(KeyMismatch);
MERA_DEFINE_ERROR(IoError);
// training
MERA_DEFINE_ERROR(EmptyDataset);
MERA_DEFINE_ERROR(ActionOutOfSpace);
MERA_DEFINE_ERROR(MissingKeys);
MERA_DEFINE_ERROR(UnknownTrainer);
// configuration and command line
MERA_DEFINE_ERROR(UsageError);
MERA_DEFINE_ERROR(MalformedJson);
MERA_DEFINE_ERROR(UnknownSkillName);
MERA_DEFINE_ERROR(InvalidValue);

#undef MERA_DEFINE_ERROR

/// Malformed line in a trajectory or checkpoint file. `line()` is 1-based.
class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace mera
