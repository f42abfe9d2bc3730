package util;

public class Config {
    private String host;
    private int port;
    private boolean verbose;
    private int retries;

    public String getHost() { return host; }
    public void setHost(String host) { this.host = host; }
    public int getPort() { return port; }
    public void setPort(int port) { this.port = port; }
    public boolean isVerbose() { return verbose; }
    public void setVerbose(boolean verbose) { this.verbose = verbose; }
    public int getRetries() { return retries; }
    public void setRetries(int retries) { this.retries = retries; }
}
