//! Request and response bodies. Requests are decoded from raw bytes so
//! every malformed input maps to a specific error code.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{ApiError, ErrorCode};

pub const MIN_PASSWORD_CHARS: usize = 8;
pub const MAX_USERNAME_CHARS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Credentials {
    pub username: String,
    pub password: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MessageRequest {
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RegisterResponse {
    pub user_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LoginResponse {
    pub token: String,
    pub user_id: String,
    pub expires_at: chrono::DateTime<chrono::Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HealthResponse {
    pub status: String,
    pub provider: String,
}

fn decode<T: DeserializeOwned>(bytes: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| match e.classify() {
        serde_json::error::Category::Data => ApiError::new(ErrorCode::InvalidRequest, e.to_string()),
        _ => ApiError::new(ErrorCode::MalformedJson, e.to_string()),
    })
}

/// Decodes a register or login body and checks the username shape.
pub fn decode_credentials(bytes: &[u8]) -> Result<Credentials, ApiError> {
    let mut creds: Credentials = decode(bytes)?;
    creds.username = creds.username.trim().to_string();
    let len = creds.username.chars().count();
    if len == 0 || len > MAX_USERNAME_CHARS || creds.username.chars().any(char::is_control) {
        return Err(ApiError::new(
            ErrorCode::InvalidUsername,
            format!("username must be 1 to {MAX_USERNAME_CHARS} printable characters"),
        ));
    }
    Ok(creds)
}

pub fn check_password_strength(password: &str) -> Result<(), ApiError> {
    if password.chars().count() < MIN_PASSWORD_CHARS {
        return Err(ApiError::new(
            ErrorCode::WeakPassword,
            format!("password must be at least {MIN_PASSWORD_CHARS} characters"),
        ));
    }
    Ok(())
}

pub fn decode_message(bytes: &[u8]) -> Result<MessageRequest, ApiError> {
    let request: MessageRequest = decode(bytes)?;
    if request.text.trim().is_empty() {
        return Err(ApiError::new(ErrorCode::EmptyUtterance, "text must not be empty"));
    }
    Ok(request)
}
