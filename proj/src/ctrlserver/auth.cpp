#include "ctrlserver/auth.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>

#include <chrono>
#include <fstream>
#include <sstream>
#include <vector>

#include "common/csv.hpp"
#include "common/digest.hpp"
#include "common/error.hpp"

namespace digirr::ctrlserver {
namespace {

std::vector<std::uint8_t> from_hex(std::string_view hex) {
  if (hex.size() % 2) fail(ErrorKind::parse, "odd-length hex string");
  std::vector<std::uint8_t> out(hex.size() / 2);
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    fail(ErrorKind::parse, "bad hex digit");
  };
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
  return out;
}

std::string to_hex(const std::uint8_t* p, std::size_t n) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(2 * n, '0');
  for (std::size_t i = 0; i < n; ++i) {
    s[2 * i] = digits[p[i] >> 4];
    s[2 * i + 1] = digits[p[i] & 0xF];
  }
  return s;
}

std::string pbkdf2(std::string_view password, const std::vector<std::uint8_t>& salt,
                   std::uint32_t iterations) {
  std::uint8_t out[32];
  if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()), salt.data(),
                        static_cast<int>(salt.size()), static_cast<int>(iterations), EVP_sha256(),
                        sizeof out, out) != 1)
    fail(ErrorKind::io, "PBKDF2 failed");
  return to_hex(out, sizeof out);
}

const char* role_name(Role r) { return r == Role::admin ? "admin" : "operator"; }

}  // namespace

PasswordRecord hash_password(std::string_view password, std::uint32_t iterations) {
  PasswordRecord r;
  r.salt_hex = random_hex(16);
  r.iterations = iterations;
  r.hash_hex = pbkdf2(password, from_hex(r.salt_hex), iterations);
  return r;
}

bool verify_password(std::string_view password, const PasswordRecord& record) {
  const std::string h = pbkdf2(password, from_hex(record.salt_hex), record.iterations);
  return h.size() == record.hash_hex.size() &&
         CRYPTO_memcmp(h.data(), record.hash_hex.data(), h.size()) == 0;
}

void UserStore::add(User user) {
  if (user.name.empty() || user.name.find(':') != std::string::npos)
    fail(ErrorKind::validation, "invalid user name");
  users_[user.name] = std::move(user);
}

void UserStore::add(std::string name, std::string_view password, Role role) {
  add(User{std::move(name), role, hash_password(password)});
}

const User* UserStore::find(std::string_view name) const {
  auto it = users_.find(name);
  return it == users_.end() ? nullptr : &it->second;
}

UserStore UserStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open credentials file " + path.string());
  UserStore store;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> parts;
    std::stringstream ss(line);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 5 || (parts[1] != "admin" && parts[1] != "operator"))
      fail(ErrorKind::config, path.string() + ":" + std::to_string(lineno) +
                                  ": expected name:role:salt:iterations:hash");
    User u;
    u.name = parts[0];
    u.role = parts[1] == "admin" ? Role::admin : Role::operator_;
    u.password.salt_hex = parts[2];
    u.password.iterations = static_cast<std::uint32_t>(csv::parse_int(parts[3]));
    u.password.hash_hex = parts[4];
    store.add(std::move(u));
  }
  return store;
}

std::string UserStore::serialize() const {
  std::string out;
  for (const auto& [name, u] : users_)
    out += name + ":" + role_name(u.role) + ":" + u.password.salt_hex + ":" +
           std::to_string(u.password.iterations) + ":" + u.password.hash_hex + "\n";
  return out;
}

void UserStore::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot write " + path.string());
  out << serialize();
}

SessionManager::SessionManager(UserStore users, AuthParams params, Clock clock)
    : users_(std::move(users)), params_(params), clock_(std::move(clock)) {
  if (!clock_) clock_ = steady_seconds;
}

Session SessionManager::login(std::string_view name, std::string_view password) {
  const double now = clock_();
  auto& a = attempts_[std::string(name)];
  if (a.locked_until > now) fail(ErrorKind::locked_out, "account locked");

  const User* u = users_.find(name);
  if (!u || !verify_password(password, u->password)) {
    if (++a.failures >= params_.lockout_threshold) {
      a.locked_until = now + params_.lockout_duration;
      a.failures = 0;
      fail(ErrorKind::locked_out, "account locked");
    }
    fail(ErrorKind::auth, "bad credentials");
  }
  a = {};

  Session s{u->name, u->role, random_hex(24), now + params_.session_ttl};
  sessions_[s.token] = s;
  return s;
}

void SessionManager::logout(std::string_view token) {
  auto it = sessions_.find(token);
  if (it != sessions_.end()) sessions_.erase(it);
}

const Session& SessionManager::validate(std::string_view token) {
  auto it = sessions_.find(token);
  if (token.empty() || it == sessions_.end()) fail(ErrorKind::auth, "missing or unknown session token");
  if (clock_() >= it->second.expires_at) fail(ErrorKind::session_expired, "session expired");
  return it->second;
}

bool SessionManager::locked(std::string_view user) const {
  auto it = attempts_.find(user);
  return it != attempts_.end() && it->second.locked_until > clock_();
}

int SessionManager::consecutive_failures(std::string_view user) const {
  auto it = attempts_.find(user);
  return it == attempts_.end() ? 0 : it->second.failures;
}

double steady_seconds() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

}  // namespace digirr::ctrlserver
