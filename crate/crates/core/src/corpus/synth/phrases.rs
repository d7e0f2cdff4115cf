//! Template phrase banks for synthetic sessions, following the usual
//! greeting -> problem -> Q&A -> closing flow of a support chat.

pub const AGENT_GREETING: &[&str] = &[
    "Hi, thank you for contacting Technical Support. How may I help you today?",
    "Hello, you are chatting with Technical Support. What can I do for you today?",
    "Hi there, thanks for reaching out to Technical Support. How can I assist?",
];

pub const CUSTOMER_OPENING: &[&str] = &[
    "hi",
    "hello",
    "hi there",
    "hey",
    "hello, I have a question about my phone",
    "hi, I need some assistance",
];

pub const CUSTOMER_PROBLEM: &[&str] = &[
    "I purchased a phone and then I noticed a scuff on my screen",
    "every time I try to sign into Google accounts it just spins",
    "I ran an update last week",
    "and I am not getting picture messages now",
    "the battery drains really fast since yesterday",
    "my phone keeps restarting on its own",
    "the camera app closes when I open it",
    "my screen has a crack in the corner",
    "there is a crack across the display and it looks horrible",
    "the touch screen is useless near the crack",
    "the phone gets hot when charging",
    "I cannot connect to my home wifi anymore",
    "the speaker sounds distorted during calls",
    "my contacts disappeared after the update",
];

pub const AGENT_PROBING: &[&str] = &[
    "Thank you. May I have the model number of your device?",
    "I can help with that. When did you first notice this?",
    "Sure, which software version is installed on the device?",
    "Have you installed any new apps recently?",
    "Thanks, can you tell me what happens when you restart the device?",
    "Is the device still under warranty?",
    "One moment while I check that for you.",
    "I understand, let me look into this.",
];

pub const AGENT_INSTRUCTION: &[&str] = &[
    "Please go to Settings and then tap on Backup and reset.",
    "Please hold the power and volume down keys for ten seconds.",
    "Open the Application manager and clear the cache for that app.",
    "Turn the device off and remove the battery for a minute.",
    "Thanks. Now tap on About device and then Software update.",
    "Boot the device into safe mode and test it again.",
    "Please check whether the issue persists in safe mode.",
    "You may need to send the device to a service center for repair.",
    "I will create a repair ticket for your device.",
];

pub const CUSTOMER_ANSWER: &[&str] = &[
    "it is a Galaxy S4",
    "about two weeks ago",
    "I just did that",
    "one second",
    "it says version 4.4.2",
    "no new apps",
    "it restarted but the same thing happens",
    "where do I find that",
    "I tried that already",
    "I have tried to restart my phone over hundred times",
    "ok let me try",
    "it is still doing it",
    "done",
    "I bought it in March",
];

pub const AGENT_CLOSING: &[&str] = &[
    "Is there anything else I can help you with?",
    "Your reference number is in the email we sent you.",
    "Thank you for your patience, I have documented everything in your case.",
    "Please visit a service center if the issue returns.",
    "I will escalate this to our service team.",
];

pub const CUSTOMER_CLOSING: &[&str] = &[
    "that is all",
    "bye",
    "bye now",
    "nothing else",
    "I will try that later",
    "fine",
];

/// Agent sign-off lines offered in resolved sessions: survey invitation,
/// transcript offer and a polite goodbye. Emitted in this order.
pub const CLOSING_RITUAL: &[&str] = &[
    "Please click the blue button to fill out a brief survey about this chat.",
    "To receive a transcript of your chat, click the button before you close the window.",
    "It was a pleasure assisting you. Have a great day!",
];

/// Valence-bearing fragments appended to a base phrase. Each carries one
/// lexicon word of the stated polarity.
pub const CUSTOMER_POSITIVE: &[&str] = &[
    "great",
    "awesome, that worked",
    "perfect",
    "I am happy with that",
    "that is excellent",
    "you have been very helpful",
    "I appreciate it",
    "wonderful",
];

pub const CUSTOMER_NEGATIVE: &[&str] = &[
    "this is ridiculous",
    "I am so frustrated",
    "this is useless",
    "terrible service",
    "I am really disappointed",
    "this is annoying",
    "what a waste of time",
    "this is the worst",
    "I am upset",
    "awful",
];

pub const AGENT_POSITIVE: &[&str] = &[
    "Great!",
    "I am glad to hear that.",
    "Excellent.",
    "Perfect, that is good news.",
    "Wonderful.",
];

pub const AGENT_NEGATIVE: &[&str] = &[
    "Unfortunately that is a known defect.",
    "That is a bad sign for the hardware.",
    "I understand this is frustrating.",
    "Unfortunately I am unable to fix this remotely.",
    "The board may be broken.",
];

pub const PRODUCTS: &[&str] = &[
    "Galaxy S3",
    "Galaxy S4",
    "Galaxy S5",
    "Galaxy Note 3",
    "Galaxy Tab 3",
];

pub const DISSATISFACTION_REASONS: &[&str] = &[
    "issue not resolved",
    "took too long",
    "agent did not understand the problem",
    "had to repeat information",
];
