//! One training thread per session, plus the registry that owns them.

use std::collections::HashMap;
use std::sync::mpsc;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use qplay_core::train::EpochMetrics;
use tokio::sync::{oneshot, watch};
use tokio_stream::wrappers::WatchStream;

use crate::config::SessionConfig;
use crate::frame::Frame;
use crate::session::{ControlCommand, Session, SessionError, SessionResult, SessionState};

pub const DEFAULT_IDLE_TTL: Duration = Duration::from_secs(30 * 60);

enum Request {
    Control(ControlCommand, oneshot::Sender<SessionResult<SessionState>>),
    History(oneshot::Sender<Vec<EpochMetrics>>),
}

/// Client side of a running session. Dropping the last handle stops the worker.
pub struct SessionHandle {
    id: String,
    requests: mpsc::Sender<Request>,
    frames: watch::Receiver<Arc<Frame>>,
    last_used: Mutex<Instant>,
}

fn publish(session: &mut Session, tx: &watch::Sender<Arc<Frame>>) {
    for frame in session.take_frames() {
        tx.send_replace(Arc::new(frame));
    }
}

fn run_worker(mut session: Session, requests: mpsc::Receiver<Request>, frames: watch::Sender<Arc<Frame>>) {
    loop {
        let request = if session.state() == SessionState::Running {
            match requests.try_recv() {
                Ok(r) => Some(r),
                Err(mpsc::TryRecvError::Empty) => None,
                Err(mpsc::TryRecvError::Disconnected) => return,
            }
        } else {
            match requests.recv() {
                Ok(r) => Some(r),
                Err(_) => return,
            }
        };
        match request {
            Some(Request::Control(command, reply)) => {
                let result = session.apply(command);
                publish(&mut session, &frames);
                let _ = reply.send(result);
            }
            Some(Request::History(reply)) => {
                let _ = reply.send(session.history().to_vec());
            }
            None => {
                // errors leave the session finished; the frame already says so
                let _ = session.tick();
                publish(&mut session, &frames);
            }
        }
    }
}

impl SessionHandle {
    /// Builds the session on the calling thread and starts its worker.
    pub fn spawn(id: String, config: SessionConfig) -> SessionResult<Self> {
        let mut session = Session::new(id.clone(), config)?;
        let first = session
            .take_frames()
            .pop()
            .expect("a new session queues its first frame");
        let (frame_tx, frame_rx) = watch::channel(Arc::new(first));
        let (req_tx, req_rx) = mpsc::channel();
        thread::Builder::new()
            .name(format!("session-{id}"))
            .spawn(move || run_worker(session, req_rx, frame_tx))
            .map_err(|e| SessionError::Runtime(e.to_string()))?;
        Ok(SessionHandle {
            id,
            requests: req_tx,
            frames: frame_rx,
            last_used: Mutex::new(Instant::now()),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    fn touch(&self) {
        *self.last_used.lock().unwrap() = Instant::now();
    }

    fn idle_for(&self, now: Instant) -> Duration {
        now.saturating_duration_since(*self.last_used.lock().unwrap())
    }

    fn stopped() -> SessionError {
        SessionError::Runtime("session worker has stopped".into())
    }

    /// Queues a command; resolves once the worker has applied it.
    pub async fn control(&self, command: ControlCommand) -> SessionResult<SessionState> {
        self.touch();
        let (tx, rx) = oneshot::channel();
        self.requests
            .send(Request::Control(command, tx))
            .map_err(|_| Self::stopped())?;
        rx.await.map_err(|_| Self::stopped())?
    }

    pub async fn history(&self) -> SessionResult<Vec<EpochMetrics>> {
        self.touch();
        let (tx, rx) = oneshot::channel();
        self.requests.send(Request::History(tx)).map_err(|_| Self::stopped())?;
        rx.await.map_err(|_| Self::stopped())
    }

    /// Latest published frame.
    pub fn snapshot(&self) -> Arc<Frame> {
        self.touch();
        self.frames.borrow().clone()
    }

    /// The latest frame, then every newer one; a slow reader skips to the newest.
    pub fn subscribe(&self) -> WatchStream<Arc<Frame>> {
        self.touch();
        WatchStream::new(self.frames.clone())
    }

    pub fn frame_receiver(&self) -> watch::Receiver<Arc<Frame>> {
        self.frames.clone()
    }
}

#[derive(Clone)]
pub struct Registry {
    sessions: Arc<Mutex<HashMap<String, Arc<SessionHandle>>>>,
    idle_ttl: Duration,
}

impl Default for Registry {
    fn default() -> Self {
        Registry::new(DEFAULT_IDLE_TTL)
    }
}

impl Registry {
    pub fn new(idle_ttl: Duration) -> Self {
        Registry {
            sessions: Arc::default(),
            idle_ttl,
        }
    }

    /// Creates a session and returns its id. Blocks while the first frame is built.
    pub fn create(&self, config: SessionConfig) -> SessionResult<String> {
        let id = uuid::Uuid::new_v4().to_string();
        let handle = SessionHandle::spawn(id.clone(), config)?;
        self.sessions.lock().unwrap().insert(id.clone(), Arc::new(handle));
        Ok(id)
    }

    pub fn get(&self, id: &str) -> Option<Arc<SessionHandle>> {
        let handle = self.sessions.lock().unwrap().get(id).cloned();
        if let Some(h) = &handle {
            h.touch();
        }
        handle
    }

    pub fn remove(&self, id: &str) -> bool {
        self.sessions.lock().unwrap().remove(id).is_some()
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Drops sessions untouched for longer than the idle TTL; returns how many.
    pub fn reap_idle(&self, now: Instant) -> usize {
        let mut sessions = self.sessions.lock().unwrap();
        let before = sessions.len();
        sessions.retain(|_, h| h.idle_for(now) <= self.idle_ttl);
        before - sessions.len()
    }

    /// Periodically reaps idle sessions on the current tokio runtime.
    pub fn spawn_reaper(&self, period: Duration) -> tokio::task::JoinHandle<()> {
        let registry = self.clone();
        tokio::spawn(async move {
            let mut interval = tokio::time::interval(period);
            loop {
                interval.tick().await;
                registry.reap_idle(Instant::now());
            }
        })
    }
}
