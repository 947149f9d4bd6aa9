//! `qplay serve`: the HTTP API on a tokio runtime with signal-driven shutdown.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::time::Duration;

use qplay_service::http::router;
use qplay_service::worker::Registry;
use tokio::net::TcpListener;
use tokio::sync::oneshot;

use crate::CliError;

const REAP_PERIOD: Duration = Duration::from_secs(60);
/// Open event streams never finish on their own; stop waiting for them after this.
const DRAIN_TIMEOUT: Duration = Duration::from_secs(2);

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = term => {}
    }
}

/// Binds, prints `listening on http://ADDR`, and serves until SIGINT/SIGTERM.
pub async fn serve(bind: &str, port: u16, ui_dir: Option<PathBuf>) -> Result<(), CliError> {
    let listener = TcpListener::bind((bind, port))
        .await
        .map_err(|e| CliError::Runtime(format!("cannot bind {bind}:{port}: {e}")))?;
    let addr: SocketAddr = listener.local_addr().map_err(|e| CliError::Runtime(e.to_string()))?;
    println!("listening on http://{addr}");

    let registry = Registry::default();
    let reaper = registry.spawn_reaper(REAP_PERIOD);
    let (stop_tx, stop_rx) = oneshot::channel::<()>();
    let server = axum::serve(listener, router(registry, ui_dir)).with_graceful_shutdown(async move {
        shutdown_signal().await;
        let _ = stop_tx.send(());
    });
    let result = tokio::select! {
        r = server => r.map_err(|e| CliError::Runtime(e.to_string())),
        _ = async {
            let _ = stop_rx.await;
            tokio::time::sleep(DRAIN_TIMEOUT).await;
        } => Ok(()),
    };
    reaper.abort();
    eprintln!("shut down");
    result
}
