#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace digirr::ctrlserver {

enum class Role { operator_, admin };

struct PasswordRecord {
  std::string salt_hex;
  std::uint32_t iterations = 0;
  std::string hash_hex;  // PBKDF2-HMAC-SHA256, 32 bytes
};

PasswordRecord hash_password(std::string_view password, std::uint32_t iterations = 20000);
bool verify_password(std::string_view password, const PasswordRecord& record);

struct User {
  std::string name;
  Role role = Role::operator_;
  PasswordRecord password;
};

// Credentials file: one user per line, `name:role:salt:iterations:hash`,
// '#' starts a comment.
class UserStore {
public:
  void add(User user);
  void add(std::string name, std::string_view password, Role role = Role::operator_);
  const User* find(std::string_view name) const;
  std::size_t size() const { return users_.size(); }

  static UserStore load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
  std::string serialize() const;

private:
  std::map<std::string, User, std::less<>> users_;
};

struct Session {
  std::string user;
  Role role = Role::operator_;
  std::string token;
  double expires_at = 0.0;
};

struct AuthParams {
  double session_ttl = 30 * 60.0;  // s
  int lockout_threshold = 10;      // consecutive failures
  double lockout_duration = 15 * 60.0;
};

// Session issuance and lookup. Time comes from the injected clock so tests
// can step it.
class SessionManager {
public:
  using Clock = std::function<double()>;

  SessionManager(UserStore users, AuthParams params, Clock clock);

  // Throws Error(auth) on bad credentials, Error(locked_out) while locked.
  Session login(std::string_view user, std::string_view password);
  void logout(std::string_view token);
  // Throws Error(auth) for unknown tokens, Error(session_expired) after TTL.
  const Session& validate(std::string_view token);

  bool locked(std::string_view user) const;
  int consecutive_failures(std::string_view user) const;
  void invalidate_all() { sessions_.clear(); }
  std::size_t active_sessions() const { return sessions_.size(); }

private:
  struct Attempts {
    int failures = 0;
    double locked_until = -1.0;
  };

  UserStore users_;
  AuthParams params_;
  Clock clock_;
  std::map<std::string, Session, std::less<>> sessions_;
  std::map<std::string, Attempts, std::less<>> attempts_;
};

// Seconds on a monotonic wall clock.
double steady_seconds();

}  // namespace digirr::ctrlserver
