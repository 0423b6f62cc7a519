//! Password hashing and bearer tokens.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use argon2::password_hash::rand_core::OsRng;
use argon2::password_hash::{PasswordHash, PasswordHasher, PasswordVerifier, SaltString};
use argon2::Argon2;
use chrono::{DateTime, Duration, Utc};
use rand::RngCore;
use stockbabble_core::Clock;

use crate::error::{ApiError, ErrorCode};

pub const TOKEN_TTL: Duration = Duration::hours(24);

/// Salted Argon2id hash in PHC string form.
pub fn hash_password(password: &str) -> String {
    let salt = SaltString::generate(&mut OsRng);
    Argon2::default()
        .hash_password(password.as_bytes(), &salt)
        .expect("argon2 with default parameters accepts any password")
        .to_string()
}

pub fn verify_password(password: &str, phc: &str) -> bool {
    PasswordHash::new(phc)
        .map(|parsed| Argon2::default().verify_password(password.as_bytes(), &parsed).is_ok())
        .unwrap_or(false)
}

#[derive(Debug, Clone)]
struct Grant {
    user_id: String,
    expires_at: DateTime<Utc>,
}

/// Issued tokens. Held in memory, so a restart signs everybody out.
pub struct TokenRegistry {
    clock: Arc<dyn Clock>,
    ttl: Duration,
    grants: Mutex<HashMap<String, Grant>>,
    /// Verified against when the username is unknown so both failure paths
    /// cost one hash verification.
    decoy_hash: String,
}

impl TokenRegistry {
    pub fn new(clock: Arc<dyn Clock>) -> Self {
        Self::with_ttl(clock, TOKEN_TTL)
    }

    pub fn with_ttl(clock: Arc<dyn Clock>, ttl: Duration) -> Self {
        Self {
            clock,
            ttl,
            grants: Mutex::new(HashMap::new()),
            decoy_hash: hash_password("decoy password that never matches"),
        }
    }

    pub fn decoy_hash(&self) -> &str {
        &self.decoy_hash
    }

    pub fn issue(&self, user_id: &str) -> (String, DateTime<Utc>) {
        let mut bytes = [0u8; 16];
        OsRng.fill_bytes(&mut bytes);
        let token: String = bytes.iter().map(|b| format!("{b:02x}")).collect();
        let expires_at = self.clock.now() + self.ttl;
        let mut grants = self.grants.lock().unwrap();
        let now = self.clock.now();
        grants.retain(|_, g| g.expires_at > now);
        grants.insert(
            token.clone(),
            Grant {
                user_id: user_id.to_string(),
                expires_at,
            },
        );
        (token, expires_at)
    }

    /// Resolves a bearer token to its user id.
    pub fn check(&self, token: &str) -> Result<String, ApiError> {
        let grants = self.grants.lock().unwrap();
        let grant = grants.get(token).ok_or_else(unauthorized)?;
        if grant.expires_at <= self.clock.now() {
            return Err(ApiError::new(ErrorCode::TokenExpired, "token expired, log in again"));
        }
        Ok(grant.user_id.clone())
    }
}

pub fn unauthorized() -> ApiError {
    ApiError::new(ErrorCode::Unauthorized, "missing or invalid token")
}

pub fn bad_credentials() -> ApiError {
    ApiError::new(ErrorCode::BadCredentials, "invalid username or password")
}

/// Extracts the token from an `Authorization: Bearer <token>` value.
pub fn bearer(header: Option<&str>) -> Result<&str, ApiError> {
    let value = header.ok_or_else(unauthorized)?;
    let (scheme, token) = value.trim().split_once(' ').ok_or_else(unauthorized)?;
    if !scheme.eq_ignore_ascii_case("bearer") || token.trim().is_empty() {
        return Err(unauthorized());
    }
    Ok(token.trim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;
    use stockbabble_core::ManualClock;

    #[test]
    fn hash_verifies_only_original_password() {
        let phc = hash_password("correct horse");
        assert!(phc.starts_with("$argon2id$"));
        assert!(!phc.contains("correct horse"));
        assert!(verify_password("correct horse", &phc));
        assert!(!verify_password("correct horsE", &phc));
        assert!(!verify_password("correct horse", "not a hash"));
    }

    #[test]
    fn tokens_expire() {
        let clock = Arc::new(ManualClock::new(Utc.with_ymd_and_hms(2021, 7, 1, 0, 0, 0).unwrap()));
        let registry = TokenRegistry::new(clock.clone());
        let (token, _) = registry.issue("u1");
        assert_eq!(token.len(), 32);
        assert_eq!(registry.check(&token).unwrap(), "u1");
        clock.advance(Duration::hours(24));
        assert_eq!(registry.check(&token).unwrap_err().code, ErrorCode::TokenExpired);
        assert_eq!(registry.check("garbage").unwrap_err().code, ErrorCode::Unauthorized);
    }

    #[test]
    fn bearer_parsing() {
        assert_eq!(bearer(Some("Bearer abc")).unwrap(), "abc");
        assert!(bearer(Some("Basic abc")).is_err());
        assert!(bearer(Some("Bearer ")).is_err());
        assert!(bearer(None).is_err());
    }
}
